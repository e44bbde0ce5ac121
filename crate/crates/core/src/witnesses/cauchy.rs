use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::metrics::{rho, rho_star, Exponent, MetricSpec};
use crate::orbit::{EllipticOrbit, Vec3, DEFAULT_KAPPA2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    /// Name of the space and distance the sequence is measured in.
    pub space: String,
    pub metric: String,
    pub p: Exponent,
    /// Size parameter of each term: semi-major axis for circles, `|c|` for
    /// the `H(b)` sequence.
    pub radii: Vec<f64>,
    pub pairwise: Vec<Vec<f64>>,
    /// `sup_{k, l ≥ n} d(x_k, x_l)` over the computed terms.
    pub cauchy_modulus: Vec<f64>,
    /// Largest `|d(x_m, x_n) − |1/m − 1/n||` over the matrix.
    pub max_deviation: f64,
    pub deviation_tolerance: f64,
    pub matches_closed_form: bool,
    /// Every term passed the membership predicate of the space.
    pub terms_are_members: bool,
    /// The coordinate limit of the sequence fails the membership predicate.
    pub limit_candidate_excluded: bool,
}

impl CauchyReport {
    pub fn passed(&self) -> bool {
        self.matches_closed_form && self.terms_are_members && self.limit_candidate_excluded
    }
}

fn concentric_circle(radius: f64) -> Result<EllipticOrbit> {
    EllipticOrbit::new(
        Vec3::new(0.0, 0.0, (DEFAULT_KAPPA2 * radius).sqrt()),
        0.0,
        Vec3::x(),
        DEFAULT_KAPPA2,
    )
}

/// Tail suprema of a symmetric matrix.
fn tail_modulus(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    (0..n)
        .map(|i| {
            (i..n)
                .flat_map(|k| (k..n).map(move |l| (k, l)))
                .map(|(k, l)| m[k][l])
                .fold(0.0, f64::max)
        })
        .collect()
}

fn reciprocal_gap(m: usize, n: usize) -> f64 {
    (1.0 / m as f64 - 1.0 / n as f64).abs()
}

struct Sequence<'a> {
    space: String,
    metric: String,
    p: Exponent,
    radii: Vec<f64>,
    tol: f64,
    members: bool,
    limit_excluded: bool,
    distance: &'a dyn Fn(usize, usize) -> Result<f64>,
}

#[allow(clippy::needless_range_loop)]
fn report(seq: Sequence<'_>) -> Result<CauchyReport> {
    let n = seq.radii.len();
    let mut pairwise = vec![vec![0.0; n]; n];
    let mut max_deviation: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (seq.distance)(i, j)?;
            pairwise[i][j] = d;
            pairwise[j][i] = d;
            max_deviation = max_deviation.max((d - reciprocal_gap(i + 1, j + 1)).abs());
        }
    }
    Ok(CauchyReport {
        space: seq.space,
        metric: seq.metric,
        p: seq.p,
        radii: seq.radii,
        cauchy_modulus: tail_modulus(&pairwise),
        pairwise,
        max_deviation,
        deviation_tolerance: seq.tol,
        matches_closed_form: max_deviation <= seq.tol,
        terms_are_members: seq.members,
        limit_candidate_excluded: seq.limit_excluded,
    })
}

/// Concentric coplanar circles of radii `1/n`, `n = 1..=n_max`, with aligned
/// pericenter marks, measured in `ρ_p`. Consecutive terms approach each other
/// while the radii tend to zero, and a circle of radius zero is not an orbit.
pub fn cauchy_circle_witness(n_max: usize, p: Exponent, spec: &MetricSpec) -> Result<CauchyReport> {
    if n_max < 3 {
        return Err(OrbitError::InvalidArgument(format!(
            "n_max must be at least 3, got {n_max}"
        )));
    }
    let spec = MetricSpec { p, ..*spec };
    let radii: Vec<f64> = (1..=n_max).map(|n| 1.0 / n as f64).collect();
    let orbits = radii
        .iter()
        .map(|&r| concentric_circle(r))
        .collect::<Result<Vec<_>>>()?;
    let distance = |i: usize, j: usize| rho(&orbits[i], &orbits[j], &spec).map(|r| r.value);
    report(Sequence {
        space: "E".into(),
        metric: "rho".into(),
        p,
        radii,
        tol: 10.0 * spec.refine_tol,
        members: orbits
            .iter()
            .all(|o| EllipticOrbit::is_member(&o.c(), o.emag())),
        limit_excluded: !EllipticOrbit::is_member(&Vec3::zeros(), 0.0),
        distance: &distance,
    })
}

/// Space probed by [`completeness_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Space {
    /// `H(b)`: orbits with `|c| > b`, Euclidean metric on `(c, e)`.
    HFloor(f64),
    /// Elliptic orbits with marked pericenter under `ρ*_p`.
    EStar,
}

/// Cauchy sequence converging, in coordinates, to the excluded boundary of
/// the space: `c_n = (b + 1/n) ẑ, e = 0` in `H(b)`, or circles of radius
/// `1/n` in the elliptic space.
pub fn completeness_probe(space: Space, n_max: usize, spec: &MetricSpec) -> Result<CauchyReport> {
    if n_max < 3 {
        return Err(OrbitError::InvalidArgument(format!(
            "n_max must be at least 3, got {n_max}"
        )));
    }
    match space {
        Space::HFloor(b) => {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(OrbitError::InvalidArgument(format!(
                    "floor b must be nonnegative, got {b}"
                )));
            }
            let terms: Vec<(Vec3, Vec3)> = (1..=n_max)
                .map(|n| (Vec3::new(0.0, 0.0, b + 1.0 / n as f64), Vec3::zeros()))
                .collect();
            let member = |c: &Vec3, e: &Vec3| c.norm() > b && c.dot(e) == 0.0;
            let distance = |i: usize, j: usize| {
                let (ci, ei) = &terms[i];
                let (cj, ej) = &terms[j];
                Ok(((ci - cj).norm_squared() + (ei - ej).norm_squared()).sqrt())
            };
            let limit = Vec3::new(0.0, 0.0, b);
            report(Sequence {
                space: format!("H({b})"),
                metric: "euclidean".into(),
                p: Exponent::Finite(2.0),
                radii: terms.iter().map(|(c, _)| c.norm()).collect(),
                // Differences of b + 1/n carry rounding relative to b.
                tol: 1e-12 * (1.0 + b),
                members: terms.iter().all(|(c, e)| member(c, e)),
                limit_excluded: !member(&limit, &Vec3::zeros()),
                distance: &distance,
            })
        }
        Space::EStar => {
            let radii: Vec<f64> = (1..=n_max).map(|n| 1.0 / n as f64).collect();
            let orbits = radii
                .iter()
                .map(|&r| concentric_circle(r))
                .collect::<Result<Vec<_>>>()?;
            let distance =
                |i: usize, j: usize| rho_star(&orbits[i], &orbits[j], spec).map(|r| r.value);
            report(Sequence {
                space: "E*".into(),
                metric: "rho_star".into(),
                p: spec.p,
                radii,
                tol: 10.0 * spec.refine_tol,
                members: orbits
                    .iter()
                    .all(|o| EllipticOrbit::is_member(&o.c(), o.emag())),
                limit_excluded: !EllipticOrbit::is_member(&Vec3::zeros(), 0.0),
                distance: &distance,
            })
        }
    }
}
