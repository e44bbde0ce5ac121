//! Pairwise distances over a catalog.

use orbit_spaces::metrics::{rho, rho_star, Exponent};
use orbit_spaces::{EllipticOrbit, OrbitError};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::CatalogRecord;
use crate::config::{MetricKind, RunConfig};
use crate::error::{CatalogError, Result};

/// Distance between two orbits under the configured metric.
pub fn dist(
    a: &EllipticOrbit,
    b: &EllipticOrbit,
    config: &RunConfig,
) -> std::result::Result<f64, OrbitError> {
    let spec = config.metric_spec();
    let r = match config.metric {
        MetricKind::Rho => rho(a, b, &spec)?,
        MetricKind::RhoStar => rho_star(a, b, &spec)?,
    };
    Ok(r.value)
}

fn orbits(records: &[CatalogRecord]) -> Result<Vec<EllipticOrbit>> {
    records
        .iter()
        .map(|r| {
            r.orbit().map_err(|source| CatalogError::Record {
                id: r.id.clone(),
                source,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    pub metric: MetricKind,
    pub p: Exponent,
    pub ids: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

/// Symmetric matrix of pairwise distances with zero diagonal.
///
/// Each entry is one independent [`dist`] call, so the result does not depend
/// on how pairs are spread over threads.
pub fn distance_matrix(records: &[CatalogRecord], config: &RunConfig) -> Result<DistanceMatrix> {
    config.validate()?;
    let orbs = orbits(records)?;
    let n = orbs.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let pool = config.thread_pool()?;
    let values: Vec<std::result::Result<f64, OrbitError>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| dist(&orbs[i], &orbs[j], config))
            .collect()
    });

    let mut matrix = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        let v = v.map_err(|source| CatalogError::Pair {
            a: records[i].id.clone(),
            b: records[j].id.clone(),
            source,
        })?;
        matrix[i][j] = v;
        matrix[j][i] = v;
    }
    Ok(DistanceMatrix {
        metric: config.metric,
        p: config.p,
        ids: records.iter().map(|r| r.id.clone()).collect(),
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub id: String,
    pub distance: f64,
}

/// The `k` records closest to `query_id`, nearest first; equal distances are
/// ordered by id.
pub fn nearest(
    records: &[CatalogRecord],
    query_id: &str,
    k: usize,
    config: &RunConfig,
) -> Result<Vec<Neighbor>> {
    config.validate()?;
    let qi = records
        .iter()
        .position(|r| r.id == query_id)
        .ok_or_else(|| CatalogError::UnknownId(query_id.to_string()))?;
    if k == 0 || k >= records.len() {
        return Err(CatalogError::InvalidK {
            k,
            size: records.len(),
        });
    }
    let orbs = orbits(records)?;
    let pool = config.thread_pool()?;
    let values: Vec<(usize, std::result::Result<f64, OrbitError>)> = pool.install(|| {
        (0..records.len())
            .into_par_iter()
            .filter(|&j| j != qi)
            .map(|j| (j, dist(&orbs[qi], &orbs[j], config)))
            .collect()
    });
    let mut ranked = Vec::with_capacity(values.len());
    for (j, v) in values {
        let distance = v.map_err(|source| CatalogError::Pair {
            a: query_id.to_string(),
            b: records[j].id.clone(),
            source,
        })?;
        ranked.push(Neighbor {
            id: records[j].id.clone(),
            distance,
        });
    }
    ranked.sort_by(|x, y| {
        x.distance
            .total_cmp(&y.distance)
            .then_with(|| x.id.cmp(&y.id))
    });
    ranked.truncate(k);
    Ok(ranked)
}
