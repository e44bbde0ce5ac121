//! Seeded samplers used by the randomized checks.
//!
//! Every sampler draws from a caller-owned [`ChaCha8Rng`] so that a seed fully
//! determines a run.

use std::f64::consts::{PI, TAU};

use rand::Rng;
pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::charts::NormalizedOrbitPoint;
use crate::orbit::{elements_to_orbit, EllipticOrbit, KeplerElements, StateVector, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the unit sphere.
pub fn unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..TAU);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
}

/// Unit vector orthogonal to the unit vector `n`, uniform on that circle.
pub fn orthogonal_unit<R: Rng>(rng: &mut R, n: &Vec3) -> Vec3 {
    let helper = if n.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let t1 = n.cross(&helper).normalize();
    let t2 = n.cross(&t1);
    let phi: f64 = rng.gen_range(0.0..TAU);
    t1 * phi.cos() + t2 * phi.sin()
}

/// Rotation matrix drawn from a uniform axis and angle.
pub fn rotation<R: Rng>(rng: &mut R) -> nalgebra::Rotation3<f64> {
    let axis = nalgebra::Unit::new_normalize(unit_vector(rng));
    nalgebra::Rotation3::from_axis_angle(&axis, rng.gen_range(0.0..TAU))
}

/// State in the box `[−2, 2]³ × [−2, 2]³` with `|r| ≥ 0.1` and
/// `κ² ∈ [0.5, 2]`.
pub fn state_vector<R: Rng>(rng: &mut R) -> StateVector {
    let kappa2 = rng.gen_range(0.5..2.0);
    loop {
        let r = Vec3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
        let v = Vec3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
        if r.norm() >= 0.1 {
            return StateVector { r, v, kappa2 };
        }
    }
}

/// Elements with `a ∈ [0.5, 2]`, `e ∈ [0, emax]` and an isotropic
/// orientation.
pub fn kepler_elements<R: Rng>(rng: &mut R, emax: f64) -> KeplerElements {
    KeplerElements {
        a: rng.gen_range(0.5..=2.0),
        ecc: rng.gen_range(0.0..=emax),
        inc: rng.gen_range(-1.0f64..=1.0).acos(),
        raan: rng.gen_range(0.0..TAU),
        argp: rng.gen_range(0.0..TAU),
    }
}

pub fn elliptic_orbit<R: Rng>(rng: &mut R, emax: f64, kappa2: f64) -> EllipticOrbit {
    let el = kepler_elements(rng, emax);
    elements_to_orbit(&el, kappa2).expect("sampled elements are valid")
}

/// Which part of the normalized orbit manifold a sample comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    Linear,
    Circular,
    General,
}

/// Point of `e² − hc² = 1, c ⟂ e` with `h ∈ [−3, 3]`. One sample in ten is
/// linear (`c = 0`) and one in ten circular (`e = 0`).
pub fn manifold_point<R: Rng>(rng: &mut R) -> (NormalizedOrbitPoint, Stratum) {
    let n = unit_vector(rng);
    let m = orthogonal_unit(rng, &n);
    let pick: f64 = rng.gen();
    if pick < 0.1 {
        let h = rng.gen_range(-3.0..3.0);
        return (
            NormalizedOrbitPoint {
                c: Vec3::zeros(),
                e: n,
                h,
            },
            Stratum::Linear,
        );
    }
    if pick < 0.2 {
        let h: f64 = -rng.gen_range(0.05..3.0);
        let c = n * (-1.0 / h).sqrt();
        return (
            NormalizedOrbitPoint {
                c,
                e: Vec3::zeros(),
                h,
            },
            Stratum::Circular,
        );
    }
    let h: f64 = rng.gen_range(-3.0..3.0);
    let cmag = if h < 0.0 {
        rng.gen_range(0.01..0.99) * (-1.0 / h).sqrt()
    } else {
        rng.gen_range(0.01..3.0)
    };
    let emag = (1.0 + h * cmag * cmag).sqrt();
    (
        NormalizedOrbitPoint {
            c: n * cmag,
            e: m * emag,
            h,
        },
        Stratum::General,
    )
}

/// Point of the `h = −1` stratum, where the relations reduce to
/// `c² + e² = 1, c ⟂ e`.
pub fn unit_energy_stratum_point<R: Rng>(rng: &mut R) -> NormalizedOrbitPoint {
    let n = unit_vector(rng);
    let m = orthogonal_unit(rng, &n);
    let theta: f64 = rng.gen_range(0.0..=PI / 2.0);
    let (st, ct) = theta.sin_cos();
    NormalizedOrbitPoint {
        c: n * ct,
        e: m * st,
        h: -1.0,
    }
}
