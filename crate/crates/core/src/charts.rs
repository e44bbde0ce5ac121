//! Explicit homeomorphisms of orbit spaces.
//!
//! * `H(b) → TS² × (b, ∞)`: `(c, e) ↦ (c/|c|, e, |c|)`.
//! * `H → (0, ∞) × S² × S²`: after rescaling `c` so that the energy relation
//!   reads `e² − hc² = 1`, the map `(h, c, e) ↦ (k, p, q)` with
//!   `p = (c+e)/|c+e|`, `q = (c−e)/|c−e|`, `s = −e²/c²` and
//!   `k = exp(−h) − exp(s)`.
//! * `E* → BT(S²) × (0, ∞)`: `(c, e) ↦ (c/|c|, e, |c|)` with `|e| < 1`.
//!
//! Tangent vectors are kept extrinsically, as 3-vectors orthogonal to their
//! base point. `TS²` has no global frame, so intrinsic coordinates would only
//! be local.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::orbit::{
    check_kappa2, default_pericenter, EllipticOrbit, OrbitPoint, Vec3, DEFAULT_CONSTRAINT_TOL,
};

const UNIT_TOL: f64 = 1e-12;
const MANIFOLD_TOL: f64 = 1e-10;

/// A point of the tangent bundle of the unit sphere together with a radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentChartPoint {
    pub base: Vec3,
    pub tangent: Vec3,
    pub radius: f64,
}

impl TangentChartPoint {
    /// Checks `|base| = 1` and `base ⟂ tangent` to `1e-12`.
    pub fn validate(&self) -> Result<()> {
        if (self.base.norm() - 1.0).abs() > UNIT_TOL {
            return Err(OrbitError::ChartDomain(format!(
                "base point is not on the unit sphere (|base| = {})",
                self.base.norm()
            )));
        }
        let dot = self.base.dot(&self.tangent);
        if dot.abs() > UNIT_TOL * self.tangent.norm().max(1.0) {
            return Err(OrbitError::ChartDomain(format!(
                "tangent vector is not orthogonal to its base point (dot = {dot:e})"
            )));
        }
        Ok(())
    }
}

/// Extended real number restricted to what the sphere-product chart needs:
/// finite values and `−∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    Finite(f64),
    NegInfinity,
}

impl ExtendedReal {
    /// `exp` with `exp(−∞) = 0`.
    pub fn exp(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x.exp(),
            ExtendedReal::NegInfinity => 0.0,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::NegInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_neg_infinity(self) -> bool {
        matches!(self, ExtendedReal::NegInfinity)
    }
}

/// Image of an orbit under the sphere-product chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereProductPoint {
    pub k: f64,
    pub p: Vec3,
    pub q: Vec3,
    /// `s ∈ [−∞, 0]`, `−∞` exactly on the linear stratum `p = −q`.
    pub s: ExtendedReal,
}

impl SphereProductPoint {
    /// Builds a point from `(k, p, q)`, deriving `s` from `p · q`.
    pub fn new(k: f64, p: Vec3, q: Vec3) -> Result<Self> {
        let (a, b) = half_gaps(&p, &q);
        let sp = Self {
            k,
            p,
            q,
            s: shape_parameter(a, b),
        };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(OrbitError::ChartDomain(format!(
                "k must be positive, got {}",
                self.k
            )));
        }
        for (name, v) in [("p", &self.p), ("q", &self.q)] {
            if (v.norm() - 1.0).abs() > UNIT_TOL {
                return Err(OrbitError::ChartDomain(format!(
                    "{name} is not on the unit sphere (|{name}| = {})",
                    v.norm()
                )));
            }
        }
        Ok(())
    }

    /// Real coordinate `ln k`, realizing the `ℝ` factor of `ℝ × S² × S²`.
    pub fn log_k(&self) -> f64 {
        self.k.ln()
    }
}

/// An orbit after the rescaling `c ↦ (√2/κ²) c`, satisfying `c·e = 0` and
/// `e² − hc² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedOrbitPoint {
    pub c: Vec3,
    pub e: Vec3,
    pub h: f64,
}

impl NormalizedOrbitPoint {
    /// `(c·e, e² − hc² − 1)`.
    pub fn residuals(&self) -> (f64, f64) {
        (
            self.c.dot(&self.e),
            self.e.norm_squared() - self.h * self.c.norm_squared() - 1.0,
        )
    }

    fn residual_scale(&self) -> f64 {
        let c2 = self.c.norm_squared();
        let e2 = self.e.norm_squared();
        1f64.max(e2)
            .max(self.h.abs() * c2)
            .max(c2.sqrt() * e2.sqrt())
    }

    /// Checks both relations to `1e-10`, relative to the size of the terms.
    pub fn validate(&self) -> Result<()> {
        let (r4, r5) = self.residuals();
        let tol = MANIFOLD_TOL * self.residual_scale();
        if r4.abs() > tol || r5.abs() > tol || !self.h.is_finite() {
            return Err(OrbitError::ConstraintViolation { r4, r5 });
        }
        Ok(())
    }

    /// Undo [`normalize`].
    pub fn denormalize(&self, kappa2: f64) -> Result<OrbitPoint> {
        check_kappa2(kappa2)?;
        Ok(OrbitPoint::new(self.c * (kappa2 / SQRT_2), self.e, self.h))
    }

    /// Euclidean norm of `(c, e)`.
    pub fn ce_norm(&self) -> f64 {
        (self.c.norm_squared() + self.e.norm_squared()).sqrt()
    }
}

/// Rescales `c` by `√2/κ²`, turning `2hc² = κ⁴(e² − 1)` into `e² − hc² = 1`.
pub fn normalize(pt: &OrbitPoint, kappa2: f64) -> Result<NormalizedOrbitPoint> {
    pt.check(kappa2, DEFAULT_CONSTRAINT_TOL)?;
    Ok(NormalizedOrbitPoint {
        c: pt.c * (SQRT_2 / kappa2),
        e: pt.e,
        h: pt.h,
    })
}

/// `H(b) → TS² × (b, ∞)`.
pub fn chart_curvilinear(c: &Vec3, e: &Vec3, b: f64) -> Result<TangentChartPoint> {
    check_floor(b)?;
    let radius = c.norm();
    if !(radius > b) {
        return Err(OrbitError::ChartDomain(format!(
            "|c| = {radius} must exceed the floor b = {b}"
        )));
    }
    let tc = TangentChartPoint {
        base: c / radius,
        tangent: *e,
        radius,
    };
    tc.validate()?;
    Ok(tc)
}

/// `TS² × (b, ∞) → H(b)`.
pub fn chart_curvilinear_inv(tc: &TangentChartPoint, b: f64) -> Result<(Vec3, Vec3)> {
    check_floor(b)?;
    tc.validate()?;
    if !(tc.radius > b) {
        return Err(OrbitError::ChartDomain(format!(
            "radius {} must exceed the floor b = {b}",
            tc.radius
        )));
    }
    Ok((tc.base * tc.radius, tc.tangent))
}

fn check_floor(b: f64) -> Result<()> {
    if b >= 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(OrbitError::InvalidArgument(format!(
            "floor b must be nonnegative, got {b}"
        )))
    }
}

/// `(|p − q|²/2, |p + q|²/2)`, equal to `(1 − p·q, 1 + p·q)` on the unit
/// sphere but without cancellation near `p = ±q`.
fn half_gaps(p: &Vec3, q: &Vec3) -> (f64, f64) {
    ((p - q).norm_squared() / 2.0, (p + q).norm_squared() / 2.0)
}

/// `s = −a/b`, `−∞` when `b = 0`.
fn shape_parameter(a: f64, b: f64) -> ExtendedReal {
    if b == 0.0 {
        ExtendedReal::NegInfinity
    } else {
        ExtendedReal::Finite(-a / b)
    }
}

/// `H → (0, ∞) × S² × S²` on normalized coordinates.
pub fn chart_h_forward(npt: &NormalizedOrbitPoint) -> Result<SphereProductPoint> {
    npt.validate()?;
    let u = npt.c + npt.e;
    let v = npt.c - npt.e;
    let (un, vn) = (u.norm(), v.norm());
    if un == 0.0 || vn == 0.0 {
        return Err(OrbitError::ChartDomain("c ± e vanishes".into()));
    }
    let c2 = npt.c.norm_squared();
    let s = if c2 == 0.0 {
        ExtendedReal::NegInfinity
    } else {
        ExtendedReal::Finite(-npt.e.norm_squared() / c2)
    };
    // exp(−h) − exp(s) = exp(−h)·(1 − exp(s + h)), evaluated without the
    // cancellation of the direct difference.
    let k = match s {
        ExtendedReal::NegInfinity => (-npt.h).exp(),
        ExtendedReal::Finite(s) => (-npt.h).exp() * -(s + npt.h).exp_m1(),
    };
    if !(k > 0.0 && k.is_finite()) {
        return Err(OrbitError::ChartDomain(format!("k = {k} is not positive")));
    }
    Ok(SphereProductPoint {
        k,
        p: u / un,
        q: v / vn,
        s,
    })
}

/// Inverse of [`chart_h_forward`].
///
/// With `a = 1 − p·q` and `b = 1 + p·q` the shape parameter is `s = −a/b`,
/// the energy follows from `k = exp(−h) − exp(s)` and the common length of
/// `c ± e` is `r = √(2/(a − bh))`.
pub fn chart_h_inverse(sp: &SphereProductPoint) -> Result<NormalizedOrbitPoint> {
    sp.validate()?;
    let (a, b) = half_gaps(&sp.p, &sp.q);
    let s = shape_parameter(a, b);
    let total = sp.k + s.exp();
    if !(total > 0.0) {
        return Err(OrbitError::ChartDomain(format!(
            "k + exp(s) = {total} is not positive"
        )));
    }
    let h = -total.ln();
    let denom = a - b * h;
    if !(denom > 0.0) {
        return Err(OrbitError::ChartDomain(format!(
            "a − b·h = {denom:e} is not positive, point is outside the chart image"
        )));
    }
    let r = (2.0 / denom).sqrt();
    Ok(NormalizedOrbitPoint {
        c: (sp.p + sp.q) * (r / 2.0),
        e: (sp.p - sp.q) * (r / 2.0),
        h,
    })
}

/// `E* → BT(S²) × (0, ∞)`.
pub fn chart_estar(orb: &EllipticOrbit) -> Result<TangentChartPoint> {
    let c = orb.c();
    let radius = c.norm();
    if !(radius > 0.0) || !(orb.emag() < 1.0) {
        return Err(OrbitError::ChartDomain("orbit is not elliptic".into()));
    }
    let tc = TangentChartPoint {
        base: c / radius,
        tangent: orb.e(),
        radius,
    };
    tc.validate()?;
    Ok(tc)
}

/// Inverse of [`chart_estar`]. On the zero section the pericenter mark is
/// taken from `mark` when given, otherwise from the default node convention.
pub fn chart_estar_inv(
    tc: &TangentChartPoint,
    kappa2: f64,
    mark: Option<Vec3>,
) -> Result<EllipticOrbit> {
    tc.validate()?;
    if !(tc.radius > 0.0) {
        return Err(OrbitError::ChartDomain(format!(
            "radius {} must be positive",
            tc.radius
        )));
    }
    let emag = tc.tangent.norm();
    if !(emag < 1.0) {
        return Err(OrbitError::ChartDomain(format!(
            "|tangent| = {emag} must be below 1"
        )));
    }
    let c = tc.base * tc.radius;
    let edir = if emag > 0.0 {
        tc.tangent / emag
    } else {
        mark.unwrap_or_else(|| default_pericenter(&c))
    };
    EllipticOrbit::new(c, emag, edir, kappa2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn normalize_circular() {
        let pt = OrbitPoint::new(Vec3::z(), Vec3::zeros(), -0.5);
        let n = normalize(&pt, 1.0).unwrap();
        assert!((n.c - Vec3::new(0.0, 0.0, SQRT_2)).norm() < 1e-15);
        assert!(n.residuals().1.abs() < 1e-15);
    }

    #[test]
    fn normalize_linear_and_general() {
        let pt = OrbitPoint::new(Vec3::zeros(), Vec3::x(), 7.0);
        let n = normalize(&pt, 1.0).unwrap();
        assert_eq!(n.residuals(), (0.0, 0.0));

        // κ² = 2, c = (0,0,2), e = (0.5,0,0): h = κ⁴(e²−1)/(2c²) = −0.375
        let pt = OrbitPoint::new(Vec3::new(0.0, 0.0, 2.0), Vec3::new(0.5, 0.0, 0.0), -0.375);
        let n = normalize(&pt, 2.0).unwrap();
        assert!(n.residuals().1.abs() < 1e-15);
        let back = n.denormalize(2.0).unwrap();
        assert!((back.c - pt.c).norm() < 1e-15);

        let bad = OrbitPoint::new(Vec3::z(), Vec3::new(0.5, 0.0, 0.0), 0.0);
        assert!(normalize(&bad, 1.0).is_err());
    }

    #[test]
    fn curvilinear_examples() {
        let tc =
            chart_curvilinear(&Vec3::new(0.0, 0.0, 2.0), &Vec3::new(0.5, 0.0, 0.0), 0.0).unwrap();
        assert_eq!(tc.base, Vec3::z());
        assert_eq!(tc.tangent, Vec3::new(0.5, 0.0, 0.0));
        assert_eq!(tc.radius, 2.0);

        let tc = chart_curvilinear(&Vec3::y(), &Vec3::zeros(), 0.0).unwrap();
        assert_eq!(tc.tangent, Vec3::zeros());

        assert!(chart_curvilinear(&Vec3::z(), &Vec3::zeros(), 1.0).is_err());
        assert!(chart_curvilinear(&Vec3::z(), &Vec3::z(), 0.0).is_err());
    }

    #[test]
    fn curvilinear_inverse_examples() {
        let tc = TangentChartPoint {
            base: Vec3::z(),
            tangent: Vec3::new(0.5, 0.0, 0.0),
            radius: 2.0,
        };
        let (c, e) = chart_curvilinear_inv(&tc, 0.0).unwrap();
        assert_eq!(c, Vec3::new(0.0, 0.0, 2.0));
        assert_eq!(e, Vec3::new(0.5, 0.0, 0.0));

        let zero = TangentChartPoint {
            tangent: Vec3::zeros(),
            ..tc
        };
        let (_, e) = chart_curvilinear_inv(&zero, 0.0).unwrap();
        assert_eq!(e.norm(), 0.0);

        let boundary = TangentChartPoint { radius: 1.0, ..tc };
        assert!(chart_curvilinear_inv(&boundary, 1.0).is_err());
    }

    #[test]
    fn forward_circular() {
        let npt = NormalizedOrbitPoint {
            c: Vec3::z(),
            e: Vec3::zeros(),
            h: -1.0,
        };
        let sp = chart_h_forward(&npt).unwrap();
        assert_eq!(sp.p, Vec3::z());
        assert_eq!(sp.q, Vec3::z());
        assert_eq!(sp.s, ExtendedReal::Finite(-0.0));
        assert!((sp.k - (E - 1.0)).abs() < 1e-15);
        assert!((sp.k - 1.718_281_828_459_045).abs() < 1e-15);
    }

    #[test]
    fn forward_linear() {
        let npt = NormalizedOrbitPoint {
            c: Vec3::zeros(),
            e: Vec3::x(),
            h: 0.3,
        };
        let sp = chart_h_forward(&npt).unwrap();
        assert_eq!(sp.p, Vec3::x());
        assert_eq!(sp.q, -Vec3::x());
        assert!(sp.s.is_neg_infinity());
        assert!((sp.k - 0.740_818_220_681_717_8).abs() < 1e-15);
    }

    #[test]
    fn forward_rejects_off_manifold() {
        let npt = NormalizedOrbitPoint {
            c: Vec3::z(),
            e: Vec3::zeros(),
            h: -0.5,
        };
        assert!(chart_h_forward(&npt).is_err());
    }

    #[test]
    fn inverse_examples() {
        let sp = SphereProductPoint::new(E - 1.0, Vec3::z(), Vec3::z()).unwrap();
        assert_eq!(sp.s, ExtendedReal::Finite(-0.0));
        let n = chart_h_inverse(&sp).unwrap();
        assert!((n.h + 1.0).abs() < 1e-15);
        assert!((n.c - Vec3::z()).norm() < 1e-15);
        assert_eq!(n.e, Vec3::zeros());

        let sp = SphereProductPoint::new((-0.3f64).exp(), Vec3::x(), -Vec3::x()).unwrap();
        assert!(sp.s.is_neg_infinity());
        let n = chart_h_inverse(&sp).unwrap();
        assert!((n.h - 0.3).abs() < 1e-15);
        assert_eq!(n.c, Vec3::zeros());
        assert!((n.e - Vec3::x()).norm() < 1e-15);
    }

    #[test]
    fn inverse_rejects_bad_points() {
        assert!(SphereProductPoint::new(0.0, Vec3::z(), Vec3::z()).is_err());
        assert!(SphereProductPoint::new(1.0, Vec3::z() * 2.0, Vec3::z()).is_err());
    }

    #[test]
    fn pythagorean_lengths() {
        let npt = NormalizedOrbitPoint {
            c: Vec3::new(0.0, 0.0, 2.0),
            e: Vec3::new(1.5, 0.0, 0.0),
            h: (2.25 - 1.0) / 4.0,
        };
        let (u, v) = (npt.c + npt.e, npt.c - npt.e);
        assert!((u.norm() - 6.25f64.sqrt()).abs() < 1e-15);
        assert!((v.norm() - 6.25f64.sqrt()).abs() < 1e-15);
        let back = chart_h_inverse(&chart_h_forward(&npt).unwrap()).unwrap();
        assert!((back.c - npt.c).norm() < 1e-14 && (back.e - npt.e).norm() < 1e-14);
        assert!((back.h - npt.h).abs() < 1e-14);
    }

    #[test]
    fn estar_examples() {
        let orb = EllipticOrbit::new(Vec3::z(), 0.5, Vec3::x(), 1.0).unwrap();
        let tc = chart_estar(&orb).unwrap();
        assert_eq!(tc.base, Vec3::z());
        assert_eq!(tc.tangent, Vec3::new(0.5, 0.0, 0.0));
        assert_eq!(tc.radius, 1.0);
        assert_eq!(chart_estar_inv(&tc, 1.0, None).unwrap(), orb);

        let circ = EllipticOrbit::new(Vec3::z(), 0.0, Vec3::y(), 1.0).unwrap();
        let tc = chart_estar(&circ).unwrap();
        assert_eq!(tc.tangent, Vec3::zeros());
        assert_eq!(chart_estar_inv(&tc, 1.0, None).unwrap().edir(), Vec3::x());
        assert_eq!(chart_estar_inv(&tc, 1.0, Some(Vec3::y())).unwrap(), circ);

        let big = TangentChartPoint {
            base: Vec3::z(),
            tangent: Vec3::x(),
            radius: 1.0,
        };
        assert!(chart_estar_inv(&big, 1.0, None).is_err());
    }
}
