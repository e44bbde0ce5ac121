//! Text forms of results. Floating point values are written with 12
//! significant digits so that output does not depend on the last bits of a
//! computation.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::Result;
use crate::matrix::{DistanceMatrix, Neighbor};

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every non-integer number in a JSON tree.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn pretty(mut v: Value) -> Result<String> {
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Report of a check or witness, headed by the command and seed.
pub fn report_json(
    command: &str,
    seed: u64,
    report: &impl Serialize,
    passed: bool,
) -> Result<String> {
    let mut map = Map::new();
    map.insert("command".into(), command.into());
    map.insert("seed".into(), seed.into());
    match serde_json::to_value(report)? {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("report".into(), other);
        }
    }
    map.insert("passed".into(), passed.into());
    pretty(Value::Object(map))
}

impl DistanceMatrix {
    pub fn to_json(&self) -> Result<String> {
        pretty(serde_json::to_value(self)?)
    }

    /// Id header row and id first column.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(std::iter::once("id").chain(self.ids.iter().map(String::as_str)))?;
        for (id, row) in self.ids.iter().zip(&self.matrix) {
            let cells = row.iter().map(|&x| round_sig(x).to_string());
            w.write_record(std::iter::once(id.clone()).chain(cells))?;
        }
        Ok(
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
                .expect("csv output is UTF-8"),
        )
    }
}

#[derive(Serialize)]
struct Ranking<'a> {
    metric: String,
    p: String,
    query: &'a str,
    neighbors: &'a [Neighbor],
}

pub fn neighbors_json(
    query: &str,
    metric: &str,
    p: &str,
    neighbors: &[Neighbor],
) -> Result<String> {
    pretty(serde_json::to_value(Ranking {
        metric: metric.into(),
        p: p.into(),
        query,
        neighbors,
    })?)
}

pub fn neighbors_csv(neighbors: &[Neighbor]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "id", "distance"])?;
    for (i, n) in neighbors.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            n.id.clone(),
            round_sig(n.distance).to_string(),
        ])?;
    }
    Ok(
        String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
            .expect("csv output is UTF-8"),
    )
}
