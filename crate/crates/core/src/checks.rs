//! Seeded randomized self-checks shared by the command line tool and the
//! acceptance tests. Each check returns a serializable report with the worst
//! deviation it observed and whether that stays within the pinned tolerance.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charts::{
    chart_curvilinear, chart_curvilinear_inv, chart_h_forward, chart_h_inverse,
    NormalizedOrbitPoint, SphereProductPoint,
};
use crate::error::Result;
use crate::metrics::{rho, rho_star, DistanceResult, Exponent, MetricSpec};
use crate::orbit::{
    constraint_residuals, integrals_of_motion, EllipticOrbit, Rk4Propagator, StateVector, Vec3,
};
use crate::sampling::{self, Stratum};

pub const CONSTRAINT_TOL: f64 = 1e-12;
pub const CONSERVATION_TOL: f64 = 1e-6;
pub const ROUNDTRIP_TOL: f64 = 1e-10;
pub const CURVILINEAR_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const TRIANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub samples: usize,
    pub seed: u64,
    /// Largest residual divided by `max(1, κ⁴, |h|c²)`.
    pub max_scaled_residual: f64,
    pub passed: bool,
}

/// Integrals of motion of random states satisfy both orbit relations.
pub fn constraint_check(samples: usize, seed: u64) -> Result<ConstraintReport> {
    let mut rng = sampling::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let state = sampling::state_vector(&mut rng);
        let pt = integrals_of_motion(&state)?;
        let (r4, r5) = constraint_residuals(&pt, state.kappa2);
        let k4 = state.kappa2 * state.kappa2;
        let scale = 1f64.max(k4).max(pt.h.abs() * pt.c.norm_squared());
        worst = worst.max(r4.abs().max(r5.abs()) / scale);
    }
    Ok(ConstraintReport {
        samples,
        seed,
        max_scaled_residual: worst,
        passed: worst <= CONSTRAINT_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub ecc: f64,
    pub dt: f64,
    pub steps: usize,
    pub drift_h: f64,
    pub drift_c: f64,
    pub drift_e: f64,
    pub return_error: f64,
    pub passed: bool,
}

/// Propagates the orbit `a = 1`, eccentricity `ecc`, starting at pericenter,
/// for `steps` RK4 steps (default: one period) and reports the drift of
/// `(h, c, e)`.
pub fn conservation_check(ecc: f64, dt: f64, steps: Option<usize>) -> Result<ConservationReport> {
    let kappa2 = 1.0;
    let r = 1.0 - ecc;
    let v = ((1.0 + ecc) / (1.0 - ecc)).sqrt();
    let state = StateVector::new(Vec3::new(r, 0.0, 0.0), Vec3::new(0.0, v, 0.0), kappa2)?;
    let steps = steps.unwrap_or_else(|| (TAU / dt).round() as usize);
    let prop = Rk4Propagator::new(dt)?;
    let (end, drift) = prop.propagate_with_drift(&state, steps)?;
    let return_error = (end.r - state.r).norm().max((end.v - state.v).norm());
    Ok(ConservationReport {
        ecc,
        dt,
        steps,
        drift_h: drift.h,
        drift_c: drift.c,
        drift_e: drift.e,
        return_error,
        passed: drift.max() <= CONSERVATION_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub samples: usize,
    pub seed: u64,
    pub linear_samples: usize,
    pub circular_samples: usize,
    /// `max |x − E₂(E₁(x))|` over manifold samples, componentwise on
    /// `(c, e, h)`.
    pub max_h_roundtrip: f64,
    /// `max` over sphere-product samples of `|k'/k − 1|`, `|p' − p|`,
    /// `|q' − q|` for `E₁(E₂(y))`.
    pub max_h_reverse_roundtrip: f64,
    /// Largest manifold residual of an inverse-chart output.
    pub max_manifold_residual: f64,
    pub min_k: f64,
    pub max_curvilinear_roundtrip: f64,
    /// Largest rotation-equivariance defect of either chart.
    pub max_equivariance_error: f64,
    /// Empirical Lipschitz ratio of `E₁` at separation `1e-6`.
    pub continuity_ratio: f64,
    pub passed: bool,
}

fn max_abs3(a: &Vec3, b: &Vec3) -> f64 {
    (a - b).amax()
}

/// Round trips of both `H` and `H(b)` charts on seeded samples.
pub fn roundtrip_check(samples: usize, seed: u64) -> Result<RoundTripReport> {
    let mut rng = sampling::rng(seed);
    let mut rep = RoundTripReport {
        samples,
        seed,
        linear_samples: 0,
        circular_samples: 0,
        max_h_roundtrip: 0.0,
        max_h_reverse_roundtrip: 0.0,
        max_manifold_residual: 0.0,
        min_k: f64::INFINITY,
        max_curvilinear_roundtrip: 0.0,
        max_equivariance_error: 0.0,
        continuity_ratio: 0.0,
        passed: false,
    };
    for _ in 0..samples {
        let (x, stratum) = sampling::manifold_point(&mut rng);
        match stratum {
            Stratum::Linear => rep.linear_samples += 1,
            Stratum::Circular => rep.circular_samples += 1,
            Stratum::General => {}
        }
        let y = chart_h_forward(&x)?;
        rep.min_k = rep.min_k.min(y.k);
        let back = chart_h_inverse(&y)?;
        let err = max_abs3(&x.c, &back.c)
            .max(max_abs3(&x.e, &back.e))
            .max((x.h - back.h).abs());
        rep.max_h_roundtrip = rep.max_h_roundtrip.max(err);
        let (r4, r5) = back.residuals();
        rep.max_manifold_residual = rep.max_manifold_residual.max(r4.abs()).max(r5.abs());

        let rot = sampling::rotation(&mut rng);
        let rotated = NormalizedOrbitPoint {
            c: rot * x.c,
            e: rot * x.e,
            h: x.h,
        };
        let yr = chart_h_forward(&rotated)?;
        let eq = max_abs3(&yr.p, &(rot * y.p))
            .max(max_abs3(&yr.q, &(rot * y.q)))
            .max((yr.k - y.k).abs());
        rep.max_equivariance_error = rep.max_equivariance_error.max(eq);

        // Reverse direction from a random point of (0, ∞) × S² × S²,
        // including both degenerate strata.
        let k = rng.gen_range(-3.0f64..3.0).exp();
        let p = sampling::unit_vector(&mut rng);
        let q = match rng.gen_range(0..10) {
            0 => p,
            1 => -p,
            _ => sampling::unit_vector(&mut rng),
        };
        let sp = SphereProductPoint::new(k, p, q)?;
        let z = chart_h_inverse(&sp)?;
        let (r4, r5) = z.residuals();
        rep.max_manifold_residual = rep.max_manifold_residual.max(r4.abs()).max(r5.abs());
        let again = chart_h_forward(&z)?;
        let err = ((again.k - k) / k)
            .abs()
            .max(max_abs3(&again.p, &p))
            .max(max_abs3(&again.q, &q));
        rep.max_h_reverse_roundtrip = rep.max_h_reverse_roundtrip.max(err);

        // H(b) chart in both directions.
        let b: f64 = rng.gen_range(0.0..2.0);
        let n = sampling::unit_vector(&mut rng);
        let c = n * (b + rng.gen_range(1e-3..3.0));
        let e = sampling::orthogonal_unit(&mut rng, &n) * rng.gen_range(0.0..3.0);
        let tc = chart_curvilinear(&c, &e, b)?;
        let (c2, e2) = chart_curvilinear_inv(&tc, b)?;
        let tc2 = chart_curvilinear(&c2, &e2, b)?;
        let err = max_abs3(&c, &c2)
            .max(max_abs3(&e, &e2))
            .max(max_abs3(&tc.base, &tc2.base))
            .max(max_abs3(&tc.tangent, &tc2.tangent))
            .max((tc.radius - tc2.radius).abs());
        rep.max_curvilinear_roundtrip = rep.max_curvilinear_roundtrip.max(err);
        let tcr = chart_curvilinear(&(rot * c), &(rot * e), b)?;
        let eq =
            max_abs3(&tcr.base, &(rot * tc.base)).max(max_abs3(&tcr.tangent, &(rot * tc.tangent)));
        rep.max_equivariance_error = rep.max_equivariance_error.max(eq);
    }
    rep.continuity_ratio = continuity_ratio(samples.min(2000), seed ^ 0x5eed, 1e-6)?;
    rep.passed = rep.max_h_roundtrip <= ROUNDTRIP_TOL
        && rep.max_h_reverse_roundtrip <= ROUNDTRIP_TOL
        && rep.max_manifold_residual <= ROUNDTRIP_TOL
        && rep.min_k > 0.0
        && rep.max_curvilinear_roundtrip <= CURVILINEAR_TOL
        && rep.max_equivariance_error <= CURVILINEAR_TOL;
    Ok(rep)
}

/// Largest `|E₁(x) − E₁(x')| / |x − x'|` over nearby manifold pairs away from
/// the linear stratum, where the image of `k` is only Hölder continuous.
pub fn continuity_ratio(samples: usize, seed: u64, delta: f64) -> Result<f64> {
    let mut rng = sampling::rng(seed);
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    while taken < samples {
        let (x, stratum) = sampling::manifold_point(&mut rng);
        if stratum == Stratum::Linear || x.c.norm() < 0.1 {
            continue;
        }
        // Move along the manifold: rotate (c, e) slightly and adjust h.
        let axis = nalgebra::Unit::new_normalize(sampling::unit_vector(&mut rng));
        let rot = nalgebra::Rotation3::from_axis_angle(&axis, delta);
        let c = rot * x.c * (1.0 + delta);
        let e = rot * x.e;
        let h = (e.norm_squared() - 1.0) / c.norm_squared();
        let x2 = NormalizedOrbitPoint { c, e, h };
        let dist = ((x.c - c).norm_squared() + (x.e - e).norm_squared() + (x.h - h).powi(2)).sqrt();
        let (y1, y2) = (chart_h_forward(&x)?, chart_h_forward(&x2)?);
        let img =
            ((y1.p - y2.p).norm_squared() + (y1.q - y2.q).norm_squared() + (y1.k - y2.k).powi(2))
                .sqrt();
        worst = worst.max(img / dist);
        taken += 1;
    }
    Ok(worst)
}

/// Worst observed deviations for one metric family and exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomStats {
    pub family: String,
    pub p: Exponent,
    pub max_symmetry_error: f64,
    /// `max(d(x, z) − d(x, y) − d(y, z))`; nonpositive when the triangle
    /// inequality holds.
    pub max_triangle_excess: f64,
    pub max_self_distance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub seed: u64,
    pub stats: Vec<AxiomStats>,
    /// Largest `ρ_p` between circles that differ only by their mark.
    pub max_mark_only_rho: f64,
    /// Smallest `ρ*_p` between the same circles.
    pub min_mark_only_rho_star: f64,
    pub passed: bool,
}

type Metric = fn(&EllipticOrbit, &EllipticOrbit, &MetricSpec) -> Result<DistanceResult>;

/// Symmetry, triangle inequality and zero self-distance of `ρ*_p` and `ρ_p`
/// for `p ∈ {1, 2, ∞}` on `samples` seeded triples of elliptic orbits.
pub fn axiom_check(
    samples: usize,
    seed: u64,
    kappa2: f64,
    base: &MetricSpec,
) -> Result<AxiomReport> {
    let families: [(&str, Metric); 2] = [("rho_star", rho_star), ("rho", rho)];
    let exponents = [
        Exponent::Finite(1.0),
        Exponent::Finite(2.0),
        Exponent::Infinity,
    ];
    let mut stats = Vec::new();
    let mut max_mark_only_rho: f64 = 0.0;
    let mut min_mark_only_rho_star = f64::INFINITY;
    for (family, metric) in families {
        for p in exponents {
            let spec = MetricSpec { p, ..*base };
            let mut rng = sampling::rng(seed);
            let mut s = AxiomStats {
                family: family.to_string(),
                p,
                max_symmetry_error: 0.0,
                max_triangle_excess: f64::NEG_INFINITY,
                max_self_distance: 0.0,
                passed: false,
            };
            let triples: Vec<[EllipticOrbit; 3]> = (0..samples)
                .map(|_| std::array::from_fn(|_| sampling::elliptic_orbit(&mut rng, 0.9, kappa2)))
                .collect();
            // Triples are independent; maxima do not depend on the order in
            // which they are combined.
            let deviations = triples
                .par_iter()
                .map(|[x, y, z]| {
                    let dxy = metric(x, y, &spec)?.value;
                    let dyx = metric(y, x, &spec)?.value;
                    let dyz = metric(y, z, &spec)?.value;
                    let dxz = metric(x, z, &spec)?.value;
                    let dxx = metric(x, x, &spec)?.value;
                    Ok(((dxy - dyx).abs(), dxz - dxy - dyz, dxx))
                })
                .collect::<Result<Vec<_>>>()?;
            for (sym, tri, dxx) in deviations {
                s.max_symmetry_error = s.max_symmetry_error.max(sym);
                s.max_triangle_excess = s.max_triangle_excess.max(tri);
                s.max_self_distance = s.max_self_distance.max(dxx);
            }
            s.passed = s.max_symmetry_error <= SYMMETRY_TOL
                && s.max_triangle_excess <= TRIANGLE_SLACK
                && s.max_self_distance <= spec.refine_tol;
            stats.push(s);

            // Circles that differ only by where the pericenter is marked.
            let mut rng = sampling::rng(seed ^ 0x3a7c);
            for _ in 0..samples.clamp(1, 100) {
                let n = sampling::unit_vector(&mut rng);
                let radius = rng.gen_range(0.5..2.0);
                let c = n * (kappa2 * radius).sqrt();
                let m1 = sampling::orthogonal_unit(&mut rng, &n);
                let angle = rng.gen_range(0.1..(2.0 * PI - 0.1));
                let m2 =
                    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(n), angle)
                        * m1;
                let o1 = EllipticOrbit::new(c, 0.0, m1, kappa2)?;
                let o2 = EllipticOrbit::new(c, 0.0, m2, kappa2)?;
                max_mark_only_rho = max_mark_only_rho.max(rho(&o1, &o2, &spec)?.value);
                min_mark_only_rho_star =
                    min_mark_only_rho_star.min(rho_star(&o1, &o2, &spec)?.value);
            }
        }
    }
    let passed = stats.iter().all(|s| s.passed)
        && max_mark_only_rho <= base.refine_tol
        && min_mark_only_rho_star > 0.0;
    Ok(AxiomReport {
        samples,
        seed,
        stats,
        max_mark_only_rho,
        min_mark_only_rho_star,
        passed,
    })
}
