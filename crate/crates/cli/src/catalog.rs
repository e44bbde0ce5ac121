//! Catalog files.
//!
//! A catalog lists orbits by classical elements, one record per row:
//!
//! ```text
//! id,a,ecc,inc_deg,raan_deg,argp_deg
//! sat1,1.0,0.0,0,0,0
//! ```
//!
//! The JSON form is an array of objects with the same field names. Angles are
//! degrees in files and radians in memory.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use clap::ValueEnum;
use orbit_spaces::orbit::{elements_to_orbit, orbit_to_elements, DEFAULT_CONSTRAINT_TOL};
use orbit_spaces::{EllipticOrbit, KeplerElements, OrbitError, OrbitPoint, Vec3};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{CatalogError, Result, RowError};

pub const CATALOG_COLUMNS: [&str; 6] = ["id", "a", "ecc", "inc_deg", "raan_deg", "argp_deg"];
pub const VECTOR_COLUMNS: [&str; 8] = ["id", "cx", "cy", "cz", "ex", "ey", "ez", "h"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Csv,
    Json,
}

impl FileFormat {
    /// Guesses the format from a `.csv` or `.json` extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(FileFormat::Csv),
            "json" => Some(FileFormat::Json),
            _ => None,
        }
    }
}

/// One catalog row as it appears in a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementRow {
    pub id: String,
    pub a: f64,
    pub ecc: f64,
    pub inc_deg: f64,
    pub raan_deg: f64,
    pub argp_deg: f64,
}

/// Integrals of motion `(c, e, h)` of one orbit, as written by `convert`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorRow {
    pub id: String,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
    pub ex: f64,
    pub ey: f64,
    pub ez: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRecord {
    pub id: String,
    pub elements: KeplerElements,
    pub kappa2: f64,
}

impl CatalogRecord {
    pub fn orbit(&self) -> std::result::Result<EllipticOrbit, OrbitError> {
        elements_to_orbit(&self.elements, self.kappa2)
    }

    fn from_row(row: &ElementRow, kappa2: f64) -> std::result::Result<Self, String> {
        if row.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if !(0.0..=180.0).contains(&row.inc_deg) {
            return Err(format!(
                "inclination must lie in [0, 180] degrees, got {}",
                row.inc_deg
            ));
        }
        let elements = KeplerElements::new(
            row.a,
            row.ecc,
            inc_from_degrees(row.inc_deg),
            row.raan_deg.to_radians(),
            row.argp_deg.to_radians(),
        )
        .map_err(|e| e.to_string())?;
        Ok(Self {
            id: row.id.clone(),
            elements,
            kappa2,
        })
    }

    pub fn to_row(&self) -> ElementRow {
        let el = &self.elements;
        ElementRow {
            id: self.id.clone(),
            a: el.a,
            ecc: el.ecc,
            inc_deg: degrees_exact(el.inc, inc_from_degrees),
            raan_deg: degrees_exact(el.raan, f64::to_radians),
            argp_deg: degrees_exact(el.argp, f64::to_radians),
        }
    }
}

// 180° must not round past π.
fn inc_from_degrees(deg: f64) -> f64 {
    deg.to_radians().min(std::f64::consts::PI)
}

/// Degrees that `back` converts to exactly `rad`, when one lies within a few
/// ulps of the plain conversion. Angles read from a file always have one, so
/// saving and reloading a loaded catalog reproduces it bit for bit.
fn degrees_exact(rad: f64, back: impl Fn(f64) -> f64) -> f64 {
    let d = rad.to_degrees();
    if !d.is_finite() {
        return d;
    }
    let (mut up, mut down) = (d, d);
    for _ in 0..=4 {
        for y in [up, down] {
            if back(y) == rad {
                return y;
            }
        }
        up = up.next_up();
        down = down.next_down();
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub records: Vec<CatalogRecord>,
    /// Rows dropped under `skip_bad`.
    pub skipped: Vec<RowError>,
}

impl Catalog {
    pub fn find(&self, id: &str) -> Result<&CatalogRecord> {
        self.records
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| CatalogError::UnknownId(id.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadOptions {
    pub format: FileFormat,
    pub kappa2: f64,
    /// Drop malformed rows instead of failing the whole load.
    pub skip_bad: bool,
}

type Row<T> = std::result::Result<(u64, T), RowError>;

fn read_csv_rows<T: DeserializeOwned>(input: &str, columns: &[&str]) -> Result<Vec<Row<T>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(columns.iter().copied()) {
        return Err(CatalogError::Header {
            expected: columns.join(","),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let row = match rec {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line());
                rec.deserialize::<T>(Some(&headers))
                    .map(|v| (line, v))
                    .map_err(|e| RowError {
                        line,
                        message: field_message(&e),
                    })
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                Err(RowError {
                    line,
                    message: field_message(&e),
                })
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn field_message(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(i) => format!("column {}: {}", i + 1, err.kind()),
            None => err.kind().to_string(),
        },
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => {
            format!("expected {expected_len} fields, found {len}")
        }
        _ => e.to_string(),
    }
}

fn read_json_rows<T: DeserializeOwned>(input: &str) -> Result<Vec<Row<T>>> {
    let items: Vec<&RawValue> = serde_json::from_str(input)?;
    let base = input.as_ptr() as usize;
    Ok(items
        .into_iter()
        .map(|raw| {
            // The raw slice borrows from `input`, so its offset gives the line.
            let offset = raw.get().as_ptr() as usize - base;
            let line = 1 + input[..offset].bytes().filter(|&b| b == b'\n').count() as u64;
            serde_json::from_str::<T>(raw.get())
                .map(|v| (line, v))
                .map_err(|e| RowError {
                    line,
                    message: e.to_string(),
                })
        })
        .collect())
}

fn read_rows<T: DeserializeOwned>(
    input: &str,
    format: FileFormat,
    columns: &[&str],
) -> Result<Vec<Row<T>>> {
    match format {
        FileFormat::Csv => read_csv_rows(input, columns),
        FileFormat::Json => read_json_rows(input),
    }
}

/// Parses rows, converts them with `build` and rejects repeated ids.
fn collect<T, U>(
    rows: Vec<Row<T>>,
    skip_bad: bool,
    id: impl Fn(&T) -> &str,
    build: impl Fn(&T) -> std::result::Result<U, String>,
) -> Result<(Vec<U>, Vec<RowError>)> {
    let mut seen: HashMap<String, u64> = HashMap::new();
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for row in rows {
        let (line, raw) = match row {
            Ok(r) => r,
            Err(e) => {
                bad.push(e);
                continue;
            }
        };
        if let Some(first) = seen.get(id(&raw)) {
            bad.push(RowError {
                line,
                message: format!("duplicate id {:?} (first on line {first})", id(&raw)),
            });
            continue;
        }
        match build(&raw) {
            Ok(v) => {
                seen.insert(id(&raw).to_string(), line);
                good.push(v);
            }
            Err(message) => bad.push(RowError { line, message }),
        }
    }
    if !bad.is_empty() && !skip_bad {
        return Err(CatalogError::Malformed(bad));
    }
    Ok((good, bad))
}

pub fn parse_catalog(input: &str, opts: &LoadOptions) -> Result<Catalog> {
    let rows = read_rows::<ElementRow>(input, opts.format, &CATALOG_COLUMNS)?;
    let (records, skipped) = collect(
        rows,
        opts.skip_bad,
        |r| &r.id,
        |r| CatalogRecord::from_row(r, opts.kappa2),
    )?;
    Ok(Catalog { records, skipped })
}

pub fn read_catalog(mut reader: impl Read, opts: &LoadOptions) -> Result<Catalog> {
    let mut input = String::new();
    reader.read_to_string(&mut input)?;
    parse_catalog(&input, opts)
}

pub fn load_catalog(path: &Path, opts: &LoadOptions) -> Result<Catalog> {
    let file = File::open(path).map_err(|source| CatalogError::Io {
        path: path.into(),
        source,
    })?;
    read_catalog(file, opts)
}

fn write_rows<T: Serialize>(rows: &[T], writer: &mut dyn Write, format: FileFormat) -> Result<()> {
    match format {
        FileFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        FileFormat::Json => {
            serde_json::to_writer_pretty(&mut *writer, rows)?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

pub fn write_catalog(
    records: &[CatalogRecord],
    writer: &mut dyn Write,
    format: FileFormat,
) -> Result<()> {
    let rows: Vec<ElementRow> = records.iter().map(CatalogRecord::to_row).collect();
    write_rows(&rows, writer, format)
}

pub fn save_catalog(records: &[CatalogRecord], path: &Path, format: FileFormat) -> Result<()> {
    let mut file = File::create(path).map_err(|source| CatalogError::Io {
        path: path.into(),
        source,
    })?;
    write_catalog(records, &mut file, format)
}

/// Elements to `(c, e, h)`.
pub fn to_vectors(records: &[CatalogRecord]) -> Result<Vec<VectorRow>> {
    records
        .iter()
        .map(|r| {
            let orbit = r.orbit().map_err(|source| CatalogError::Record {
                id: r.id.clone(),
                source,
            })?;
            let OrbitPoint { c, e, h } = orbit.to_orbit_point();
            Ok(VectorRow {
                id: r.id.clone(),
                cx: c.x,
                cy: c.y,
                cz: c.z,
                ex: e.x,
                ey: e.y,
                ez: e.z,
                h,
            })
        })
        .collect()
}

pub fn write_vectors(rows: &[VectorRow], writer: &mut dyn Write, format: FileFormat) -> Result<()> {
    write_rows(rows, writer, format)
}

/// `(c, e, h)` rows back to element records. Rows must describe elliptic
/// orbits; circular orbits get the default pericenter.
pub fn parse_vectors(input: &str, opts: &LoadOptions) -> Result<Catalog> {
    let rows = read_rows::<VectorRow>(input, opts.format, &VECTOR_COLUMNS)?;
    let kappa2 = opts.kappa2;
    let build = |r: &VectorRow| {
        let pt = OrbitPoint::new(
            Vec3::new(r.cx, r.cy, r.cz),
            Vec3::new(r.ex, r.ey, r.ez),
            r.h,
        );
        let orbit = EllipticOrbit::from_orbit_point(&pt, kappa2, DEFAULT_CONSTRAINT_TOL)
            .map_err(|e| e.to_string())?;
        Ok(CatalogRecord {
            id: r.id.clone(),
            elements: orbit_to_elements(&orbit),
            kappa2,
        })
    };
    let (records, skipped) = collect(rows, opts.skip_bad, |r| &r.id, build)?;
    Ok(Catalog { records, skipped })
}
