//! Distances between elliptic orbits.
//!
//! Both families compare the orbits point by point along their
//! eccentric-anomaly parametrizations `Q₁`, `Q₂` (see [`EllipseFrame`]):
//!
//! * `ρ*_p`: the `p`-mean over `u` of `|Q₁(u) − Q₂(u)|` (or its maximum for
//!   `p = ∞`). This depends on where each pericenter is marked, so it is a
//!   metric on orbits with marked pericenter.
//! * `ρ_p`: the same quantity minimized over a phase shift `s` of the second
//!   orbit, `Q₂(u + s)`. Orbits that differ only by their mark are at distance
//!   zero, so this is a pseudometric whose quotient identifies all marks of a
//!   circular orbit.
//!
//! `p`-means use the periodic trapezoid rule with node doubling. The
//! minimization over `s` evaluates a coarse shift grid, then refines the best
//! grid minima by golden-section search. For `p = 2` the objective is an exact
//! first-order trigonometric polynomial in `s`, which [`rho2_closed_form`]
//! minimizes analytically.

mod frame;
mod quadrature;
mod search;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use frame::{ellipse_frame, EllipseFrame};

use crate::error::{OrbitError, Result};
use crate::orbit::{elements_to_orbit, EllipticOrbit, KeplerElements};
use crate::sampling;
use quadrature::{cyclic_extrema, max_norm, power_mean_adaptive, power_mean_fixed};
use search::golden_section_min;

/// Exponent `p ∈ [1, ∞]` of a metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Exponent::Finite(p) if !(p >= 1.0 && p.is_finite()) => Err(
                OrbitError::InvalidMetricSpec(format!("exponent must be at least 1, got {p}")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = OrbitError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let p = if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            Exponent::Infinity
        } else {
            let v: f64 = t.parse().map_err(|_| {
                OrbitError::InvalidMetricSpec(format!("cannot parse exponent {s:?}"))
            })?;
            if v.is_infinite() && v > 0.0 {
                Exponent::Infinity
            } else {
                Exponent::Finite(v)
            }
        };
        p.validate()?;
        Ok(p)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => {
                let e = Exponent::Finite(p);
                e.validate().map_err(serde::de::Error::custom)?;
                Ok(e)
            }
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Numerical configuration of a distance evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub p: Exponent,
    /// Initial quadrature node count, a power of two.
    pub n_u: usize,
    /// Number of phase shifts in the coarse grid of `ρ_p`.
    pub n_s: usize,
    pub refine_tol: f64,
}

impl Default for MetricSpec {
    fn default() -> Self {
        Self {
            p: Exponent::Finite(2.0),
            n_u: 512,
            n_s: 256,
            refine_tol: 1e-10,
        }
    }
}

impl MetricSpec {
    pub fn with_p(p: Exponent) -> Self {
        Self {
            p,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.p.validate()?;
        if self.n_u < 16 || !self.n_u.is_power_of_two() || self.n_u > quadrature::MAX_NODES {
            return Err(OrbitError::InvalidMetricSpec(format!(
                "n_u must be a power of two in [16, {}], got {}",
                quadrature::MAX_NODES,
                self.n_u
            )));
        }
        if self.n_s < 16 {
            return Err(OrbitError::InvalidMetricSpec(format!(
                "n_s must be at least 16, got {}",
                self.n_s
            )));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol < 1.0) {
            return Err(OrbitError::InvalidMetricSpec(format!(
                "refine_tol must lie in (0, 1), got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }

    /// Tolerance for the anomaly and shift arguments of the local searches.
    /// Tighter than `refine_tol` so that a zero distance is resolved below
    /// `refine_tol` for orbits of unit size.
    fn arg_tol(&self) -> f64 {
        self.refine_tol * 1e-2
    }

    /// Anomaly tolerance when locating `max_u |D(u)|`. The maximum is smooth,
    /// so an argument error `δ` only changes the value by `O(δ²)`.
    fn max_tol(&self) -> f64 {
        1e-2 * self.refine_tol.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub value: f64,
    /// Optimal phase shift in `[0, 2π)`; present for the `ρ_p` family only.
    pub argmin_shift: Option<f64>,
    pub estimated_error: f64,
}

fn check_pair(o1: &EllipticOrbit, o2: &EllipticOrbit) -> Result<()> {
    if o1.kappa2() != o2.kappa2() {
        return Err(OrbitError::Kappa2Mismatch(o1.kappa2(), o2.kappa2()));
    }
    Ok(())
}

/// `ρ*_p`: distance between orbits with marked pericenters.
pub fn rho_star(
    o1: &EllipticOrbit,
    o2: &EllipticOrbit,
    spec: &MetricSpec,
) -> Result<DistanceResult> {
    spec.validate()?;
    check_pair(o1, o2)?;
    let d = ellipse_frame(o1).difference(&ellipse_frame(o2));
    let (value, estimated_error) = match spec.p {
        Exponent::Finite(p) => {
            let est = power_mean_adaptive(&d, p, spec.n_u, spec.refine_tol);
            (est.value, est.change)
        }
        Exponent::Infinity => {
            let (v, _) = max_norm(&d, spec.n_u, spec.max_tol());
            (v, spec.refine_tol * (1.0 + v))
        }
    };
    Ok(DistanceResult {
        value,
        argmin_shift: None,
        estimated_error,
    })
}

/// Grid minima whose coarse value is within this fraction of the coarse
/// range above the best one are refined.
const CANDIDATE_MARGIN: f64 = 0.02;
const MAX_CANDIDATES: usize = 3;
/// Anomaly nodes per coarse shift-grid evaluation; only used to rank shifts.
const COARSE_NODES: usize = 128;

/// `ρ_p`: distance minimized over the phase shift of the second orbit.
///
/// The pair is evaluated in a canonical order, so `rho(x, y)` and
/// `rho(y, x)` agree exactly; the reported shift is the one that applies to
/// the second argument as given.
pub fn rho(o1: &EllipticOrbit, o2: &EllipticOrbit, spec: &MetricSpec) -> Result<DistanceResult> {
    spec.validate()?;
    check_pair(o1, o2)?;
    if canonical_order(o1, o2) == std::cmp::Ordering::Greater {
        let mut r = rho_ordered(o2, o1, spec);
        r.argmin_shift = r.argmin_shift.map(|s| wrap(-s));
        Ok(r)
    } else {
        Ok(rho_ordered(o1, o2, spec))
    }
}

fn canonical_order(o1: &EllipticOrbit, o2: &EllipticOrbit) -> std::cmp::Ordering {
    let key = |o: &EllipticOrbit| {
        let (c, d) = (o.c(), o.edir());
        [c.x, c.y, c.z, o.emag(), d.x, d.y, d.z]
    };
    let (a, b) = (key(o1), key(o2));
    a.iter()
        .zip(&b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Bracket re-centerings allowed when the local optimum sits on the edge of
/// its bracket, which happens when the coarse grid misplaces a flat minimum.
const MAX_BRACKET_MOVES: usize = 64;

fn rho_ordered(o1: &EllipticOrbit, o2: &EllipticOrbit, spec: &MetricSpec) -> DistanceResult {
    let f1 = ellipse_frame(o1);
    let f2 = ellipse_frame(o2);
    let diff = |s: f64| f1.difference(&f2.shifted(s));

    let ns = spec.n_s;
    let step = TAU / ns as f64;
    // The grid maximum of a nonsmooth-in-s objective needs the full anomaly
    // grid to rank shifts reliably; p-means are ranked well on fewer nodes.
    let coarse_nodes = match spec.p {
        Exponent::Infinity => spec.n_u,
        Exponent::Finite(_) => COARSE_NODES.min(spec.n_u),
    };
    let coarse: Vec<f64> = (0..ns)
        .map(|j| {
            let d = diff(j as f64 * step);
            match spec.p {
                Exponent::Finite(p) => power_mean_fixed(&d, p, coarse_nodes),
                Exponent::Infinity => max_norm_grid(&d, coarse_nodes),
            }
        })
        .collect();

    let lowest = coarse.iter().cloned().fold(f64::INFINITY, f64::min);
    let highest = coarse.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let margin = CANDIDATE_MARGIN * (highest - lowest);
    let candidates: Vec<usize> = cyclic_extrema(&coarse, |x, y| x < y, MAX_CANDIDATES)
        .into_iter()
        .filter(|&j| coarse[j] <= lowest + margin)
        .collect();

    let objective: Box<dyn Fn(f64) -> f64> = match spec.p {
        Exponent::Finite(p) => {
            let s0 = candidates[0] as f64 * step;
            let nodes = power_mean_adaptive(&diff(s0), p, spec.n_u, spec.refine_tol).nodes;
            Box::new(move |s| power_mean_fixed(&diff(s), p, nodes))
        }
        Exponent::Infinity => {
            let (n_u, tol) = (spec.n_u, spec.max_tol());
            Box::new(move |s| max_norm(&diff(s), n_u, tol).0)
        }
    };

    let tol = spec.arg_tol();
    let mut best = (f64::INFINITY, 0.0);
    for &j in &candidates {
        let mut center = j as f64 * step;
        let at_grid = objective(center);
        if at_grid < best.0 {
            best = (at_grid, center);
        }
        for _ in 0..MAX_BRACKET_MOVES {
            let (s, v) = golden_section_min(&objective, center - step, center + step, tol);
            if v < best.0 {
                best = (v, s);
            }
            if (s - center).abs() < step * 0.99 {
                break;
            }
            center = s;
        }
    }
    let shift = wrap(best.1);

    let (value, estimated_error) = match spec.p {
        Exponent::Finite(p) => {
            let est = power_mean_adaptive(&diff(shift), p, spec.n_u, spec.refine_tol);
            (est.value, est.change)
        }
        Exponent::Infinity => (best.0, spec.refine_tol * (1.0 + best.0)),
    };
    DistanceResult {
        value,
        argmin_shift: Some(shift),
        estimated_error,
    }
}

fn max_norm_grid(d: &EllipseFrame, n: usize) -> f64 {
    quadrature::nodes(n)
        .iter()
        .map(|&(c, s)| d.at(c, s).norm_squared())
        .fold(0.0, f64::max)
        .sqrt()
}

fn wrap(s: f64) -> f64 {
    let w = s.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Exact `ρ₂`.
///
/// The mean of `|Q₁(u) − Q₂(u+s)|²` over `u` keeps only the constant Fourier
/// modes, which gives `g(s) = α − β cos s − γ sin s` with
///
/// ```text
/// α = |A₁ − A₂|² + (|B₁|² + |B₂|² + |C₁|² + |C₂|²)/2
/// β = B₁·B₂ + C₁·C₂
/// γ = B₁·C₂ − C₁·B₂
/// ```
///
/// minimized at `s* = atan2(γ, β)` with `g(s*) = α − √(β² + γ²)`. The value is
/// evaluated as the mean square of the difference frame at `s*`, which avoids
/// the cancellation of `α − √(β² + γ²)` for nearly equal orbits.
pub fn rho2_closed_form(o1: &EllipticOrbit, o2: &EllipticOrbit) -> Result<DistanceResult> {
    check_pair(o1, o2)?;
    let f1 = ellipse_frame(o1);
    let f2 = ellipse_frame(o2);
    let beta = f1.b.dot(&f2.b) + f1.c.dot(&f2.c);
    let gamma = f1.b.dot(&f2.c) - f1.c.dot(&f2.b);
    let shift = wrap(gamma.atan2(beta));
    let g = f1.difference(&f2.shifted(shift)).mean_square();
    Ok(DistanceResult {
        value: g.max(0.0).sqrt(),
        argmin_shift: Some(shift),
        estimated_error: 0.0,
    })
}

/// The closed-form coefficients `(α, β, γ)` of the `p = 2` shift objective.
pub fn rho2_coefficients(o1: &EllipticOrbit, o2: &EllipticOrbit) -> (f64, f64, f64) {
    let f1 = ellipse_frame(o1);
    let f2 = ellipse_frame(o2);
    let alpha = (f1.a - f2.a).norm_squared()
        + 0.5
            * (f1.b.norm_squared()
                + f2.b.norm_squared()
                + f1.c.norm_squared()
                + f2.c.norm_squared());
    let beta = f1.b.dot(&f2.b) + f1.c.dot(&f2.c);
    let gamma = f1.b.dot(&f2.c) - f1.c.dot(&f2.b);
    (alpha, beta, gamma)
}

/// Whether two orbits are the same point of the quotient space, i.e. the same
/// oriented ellipse regardless of pericenter marks.
pub fn quotient_equal(o1: &EllipticOrbit, o2: &EllipticOrbit, tol: f64) -> bool {
    match rho2_closed_form(o1, o2) {
        Ok(r) => r.value <= tol,
        Err(_) => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub ps: Vec<Exponent>,
    pub values: Vec<f64>,
    /// Whether the values are nondecreasing in `p` up to the slack.
    pub monotone: bool,
}

pub const MONOTONICITY_SLACK: f64 = 1e-9;

/// Evaluates `ρ*_p` for every exponent in `ps` (ascending) and checks the
/// power-mean chain `ρ*_{p₁} ≤ ρ*_{p₂} ≤ …`.
pub fn p_monotonicity_check(
    o1: &EllipticOrbit,
    o2: &EllipticOrbit,
    ps: &[Exponent],
    spec: &MetricSpec,
) -> Result<MonotonicityReport> {
    let values = ps
        .iter()
        .map(|&p| rho_star(o1, o2, &MetricSpec { p, ..*spec }).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let monotone = values.windows(2).all(|w| w[0] <= w[1] + MONOTONICITY_SLACK);
    Ok(MonotonicityReport {
        ps: ps.to_vec(),
        values,
        monotone,
    })
}

/// Empirical comparison of `ρ*_2` with the Euclidean distance of `(c, e)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub samples: usize,
    pub seed: u64,
    pub thresholds: Vec<f64>,
    /// `sup ρ*₂` over sampled pairs with Euclidean distance at most the
    /// threshold.
    pub rho_envelope: Vec<f64>,
    /// `sup |Δ(c, e)|` over sampled pairs with `ρ*₂` at most the threshold.
    pub euclid_envelope: Vec<f64>,
    /// Both envelopes fall below [`TOPOLOGY_VANISH_LEVEL`] at the smallest
    /// populated threshold.
    pub vanishes: bool,
}

pub const TOPOLOGY_VANISH_LEVEL: f64 = 1e-3;

/// Samples pairs of nearby orbits in the box `0.5 ≤ a ≤ 2`, `e ≤ 0.8` at
/// separations spread over six decades and reports the moduli of continuity
/// of the identity map in both directions.
pub fn topology_probe(samples: usize, seed: u64, kappa2: f64) -> Result<TopologyReport> {
    let mut rng = sampling::rng(seed);
    let spec = MetricSpec::default();
    let mut pairs = Vec::with_capacity(samples);
    while pairs.len() < samples {
        let base = sampling::kepler_elements(&mut rng, 0.8);
        let scale = 10f64.powf(-rng.gen_range(0.0..6.0));
        let mut jitter =
            |x: f64, lo: f64, hi: f64| (x + scale * rng.gen_range(-1.0..1.0)).clamp(lo, hi);
        let other = KeplerElements {
            a: jitter(base.a, 0.5, 2.0),
            ecc: jitter(base.ecc, 0.0, 0.8),
            inc: jitter(base.inc, 0.0, std::f64::consts::PI),
            raan: jitter(base.raan, -10.0, 10.0),
            argp: jitter(base.argp, -10.0, 10.0),
        };
        let o1 = elements_to_orbit(&base, kappa2)?;
        let o2 = elements_to_orbit(&other, kappa2)?;
        let euclid = ((o1.c() - o2.c()).norm_squared() + (o1.e() - o2.e()).norm_squared()).sqrt();
        let r = rho_star(&o1, &o2, &spec)?.value;
        pairs.push((euclid, r));
    }
    let thresholds: Vec<f64> = (0..=12).map(|k| 10f64.powf(-(k as f64) / 2.0)).collect();
    let envelope = |key: fn(&(f64, f64)) -> f64, val: fn(&(f64, f64)) -> f64, t: f64| {
        pairs
            .iter()
            .filter(|p| key(p) <= t)
            .map(val)
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    };
    let mut rho_envelope = Vec::new();
    let mut euclid_envelope = Vec::new();
    let mut vanishes = true;
    let mut last = (None, None);
    for &t in &thresholds {
        let r = envelope(|p| p.0, |p| p.1, t);
        let e = envelope(|p| p.1, |p| p.0, t);
        rho_envelope.push(r.unwrap_or(f64::NAN));
        euclid_envelope.push(e.unwrap_or(f64::NAN));
        if r.is_some() {
            last.0 = r;
        }
        if e.is_some() {
            last.1 = e;
        }
    }
    for v in [last.0, last.1] {
        match v {
            Some(v) if v <= TOPOLOGY_VANISH_LEVEL => {}
            _ => vanishes = false,
        }
    }
    Ok(TopologyReport {
        samples,
        seed,
        thresholds,
        rho_envelope,
        euclid_envelope,
        vanishes,
    })
}
