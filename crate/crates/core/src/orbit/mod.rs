//! Orbit representations and integrals of motion.
//!
//! A state `(r, ṙ)` of the two-body problem `r̈ = −κ² r / |r|³` determines
//! the angular momentum `c = r × ṙ`, the Laplace vector
//! `e = (ṙ × c)/κ² − r/|r|` and the full energy `h = |ṙ|²/2 − κ²/|r|`.
//! These seven numbers always satisfy
//!
//! ```text
//! c · e = 0
//! 2 h c² − κ⁴ (e² − 1) = 0
//! ```
//!
//! Some printings of the energy integral read `h = ½ṙ − κ²/2`; that form is
//! not dimensionally consistent and does not satisfy the second relation. The
//! vis-viva energy used here does.

mod elements;
mod propagate;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};

pub use elements::{elements_to_orbit, orbit_to_elements, KeplerElements};
pub use propagate::{propagate, Drift, Rk4Propagator, DEFAULT_MIN_RADIUS};

pub type Vec3 = Vector3<f64>;

/// Normalized units: `κ² = 1`.
pub const DEFAULT_KAPPA2: f64 = 1.0;

/// Absolute constraint tolerance, applied after scaling by `max(1, κ⁴)`.
pub const DEFAULT_CONSTRAINT_TOL: f64 = 1e-9;

pub(crate) fn check_kappa2(kappa2: f64) -> Result<()> {
    if kappa2.is_finite() && kappa2 > 0.0 {
        Ok(())
    } else {
        Err(OrbitError::InvalidKappa2(kappa2))
    }
}

/// Instantaneous position and velocity of the moving body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub r: Vec3,
    pub v: Vec3,
    pub kappa2: f64,
}

impl StateVector {
    pub fn new(r: Vec3, v: Vec3, kappa2: f64) -> Result<Self> {
        check_kappa2(kappa2)?;
        if r.norm() == 0.0 {
            return Err(OrbitError::ZeroRadius);
        }
        Ok(Self { r, v, kappa2 })
    }
}

/// The `(c, e, h)` coordinates of an orbit in `ℝ⁷`.
///
/// The constructor does not enforce the orbit constraints; use
/// [`constraint_residuals`] or [`OrbitPoint::check`] for that. Charts and
/// classification validate their input themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub c: Vec3,
    pub e: Vec3,
    pub h: f64,
}

impl OrbitPoint {
    pub fn new(c: Vec3, e: Vec3, h: f64) -> Self {
        Self { c, e, h }
    }

    /// Euclidean norm of the point in `ℝ⁷`.
    pub fn norm(&self) -> f64 {
        (self.c.norm_squared() + self.e.norm_squared() + self.h * self.h).sqrt()
    }

    /// Fails unless both constraint residuals are within `tol · max(1, κ⁴)`.
    pub fn check(&self, kappa2: f64, tol: f64) -> Result<()> {
        check_kappa2(kappa2)?;
        let (r4, r5) = constraint_residuals(self, kappa2);
        let scale = (kappa2 * kappa2).max(1.0);
        if r4.abs() <= tol * scale && r5.abs() <= tol * scale {
            Ok(())
        } else {
            Err(OrbitError::ConstraintViolation { r4, r5 })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitClass {
    Circular,
    Elliptic,
    Parabolic,
    Hyperbolic,
    Linear,
}

/// Integrals of motion of a state.
pub fn integrals_of_motion(state: &StateVector) -> Result<OrbitPoint> {
    check_kappa2(state.kappa2)?;
    let r = state.r.norm();
    if r == 0.0 {
        return Err(OrbitError::ZeroRadius);
    }
    let v = state.v;
    let c = state.r.cross(&v);
    let e = v.cross(&c) / state.kappa2 - state.r / r;
    let h = 0.5 * v.norm_squared() - state.kappa2 / r;
    Ok(OrbitPoint { c, e, h })
}

/// Residuals `(c·e, 2hc² − κ⁴(e² − 1))`, unscaled.
pub fn constraint_residuals(pt: &OrbitPoint, kappa2: f64) -> (f64, f64) {
    let r4 = pt.c.dot(&pt.e);
    let k4 = kappa2 * kappa2;
    let r5 = 2.0 * pt.h * pt.c.norm_squared() - k4 * (pt.e.norm_squared() - 1.0);
    (r4, r5)
}

pub fn classify(pt: &OrbitPoint, kappa2: f64, tol: f64) -> Result<OrbitClass> {
    pt.check(kappa2, tol)?;
    let class = if pt.c.norm() <= tol {
        OrbitClass::Linear
    } else if pt.e.norm() <= tol {
        OrbitClass::Circular
    } else if pt.h < -tol {
        OrbitClass::Elliptic
    } else if pt.h > tol {
        OrbitClass::Hyperbolic
    } else {
        OrbitClass::Parabolic
    };
    Ok(class)
}

/// Tolerance used when validating unit vectors and orthogonality of
/// user-supplied orbits.
const ORBIT_TOL: f64 = 1e-9;

/// An elliptic orbit with a marked pericenter.
///
/// The eccentricity magnitude and the pericenter direction are stored apart,
/// so a circular orbit (`emag = 0`) still carries the direction its pericenter
/// had before the eccentricity vanished.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticOrbit {
    c: Vec3,
    emag: f64,
    edir: Vec3,
    kappa2: f64,
}

impl EllipticOrbit {
    /// Validates and stores the orbit. `edir` is re-projected onto the unit
    /// circle of the orbital plane so the stored value satisfies the
    /// invariants to rounding.
    pub fn new(c: Vec3, emag: f64, edir: Vec3, kappa2: f64) -> Result<Self> {
        check_kappa2(kappa2)?;
        let cn = c.norm();
        if !(cn > 0.0 && cn.is_finite()) {
            return Err(OrbitError::InvalidOrbit(format!(
                "angular momentum must be nonzero, got |c| = {cn}"
            )));
        }
        if !(0.0..1.0).contains(&emag) {
            return Err(OrbitError::InvalidOrbit(format!(
                "eccentricity must lie in [0, 1), got {emag}"
            )));
        }
        if (edir.norm() - 1.0).abs() > ORBIT_TOL {
            return Err(OrbitError::InvalidOrbit(format!(
                "pericenter direction is not a unit vector (|edir| = {})",
                edir.norm()
            )));
        }
        let chat = c / cn;
        if chat.dot(&edir).abs() > ORBIT_TOL {
            return Err(OrbitError::InvalidOrbit(format!(
                "pericenter direction is not orthogonal to c (ĉ·edir = {:e})",
                chat.dot(&edir)
            )));
        }
        let edir = (edir - chat * chat.dot(&edir)).normalize();
        Ok(Self {
            c,
            emag,
            edir,
            kappa2,
        })
    }

    /// Builds an orbit from the vectors `(c, e)`. When `e = 0` the
    /// pericenter mark defaults to [`default_pericenter`].
    pub fn from_vectors(c: Vec3, e: Vec3, kappa2: f64) -> Result<Self> {
        let emag = e.norm();
        let edir = if emag > 0.0 {
            e / emag
        } else {
            default_pericenter(&c)
        };
        Self::new(c, emag, edir, kappa2)
    }

    /// Accepts a point of `H` that is an elliptic (or circular) orbit.
    pub fn from_orbit_point(pt: &OrbitPoint, kappa2: f64, tol: f64) -> Result<Self> {
        pt.check(kappa2, tol)?;
        Self::from_vectors(pt.c, pt.e, kappa2)
    }

    pub fn c(&self) -> Vec3 {
        self.c
    }

    pub fn emag(&self) -> f64 {
        self.emag
    }

    pub fn edir(&self) -> Vec3 {
        self.edir
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    /// Laplace vector `emag · edir`.
    pub fn e(&self) -> Vec3 {
        self.edir * self.emag
    }

    /// `h = κ⁴(e² − 1) / (2c²)`.
    pub fn energy(&self) -> f64 {
        let k4 = self.kappa2 * self.kappa2;
        k4 * (self.emag * self.emag - 1.0) / (2.0 * self.c.norm_squared())
    }

    /// `a = c² / (κ² (1 − e²))`.
    pub fn semi_major_axis(&self) -> f64 {
        self.c.norm_squared() / (self.kappa2 * (1.0 - self.emag * self.emag))
    }

    pub fn to_orbit_point(&self) -> OrbitPoint {
        OrbitPoint::new(self.c, self.e(), self.energy())
    }

    /// Same orbit with a different pericenter mark. Only meaningful (and only
    /// accepted by the invariants) as a new orbit when `edir` is in-plane.
    pub fn with_edir(&self, edir: Vec3) -> Result<Self> {
        Self::new(self.c, self.emag, edir, self.kappa2)
    }

    /// Whether `(c, emag, edir)` describes a member of the elliptic space.
    pub fn is_member(c: &Vec3, emag: f64) -> bool {
        c.norm() > 0.0 && (0.0..1.0).contains(&emag)
    }
}

/// Pericenter direction used when none is recorded: the ascending node
/// `ẑ × c` normalized, or `+x` for orbits in the reference plane. This is the
/// direction `argp = 0` points to under the element conventions.
pub fn default_pericenter(c: &Vec3) -> Vec3 {
    let node = Vec3::new(-c.y, c.x, 0.0);
    let n = node.norm();
    if n > NODE_EPS * c.norm() {
        node / n
    } else {
        Vec3::x()
    }
}

/// Below this ratio `|ẑ × ĉ|` the orbit is treated as lying in the reference
/// plane (inclination 0 or π).
pub(crate) const NODE_EPS: f64 = 1e-14;
