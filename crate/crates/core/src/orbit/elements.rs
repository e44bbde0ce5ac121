//! Classical elements of elliptic orbits.
//!
//! The orientation follows the usual `Rz(Ω) · Rx(i) · Rz(ω)` rotation of the
//! perifocal frame. When the orbit lies in the reference plane (`i = 0` or
//! `i = π`) the node line is undefined; `Ω` is then set to 0 and `ω` is
//! measured from `+x`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{check_kappa2, EllipticOrbit, Vec3, NODE_EPS};
use crate::error::{OrbitError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeplerElements {
    /// Semi-major axis.
    pub a: f64,
    pub ecc: f64,
    /// Inclination, radians.
    pub inc: f64,
    /// Longitude of the ascending node, radians.
    pub raan: f64,
    /// Argument of pericenter, radians.
    pub argp: f64,
}

impl KeplerElements {
    pub fn new(a: f64, ecc: f64, inc: f64, raan: f64, argp: f64) -> Result<Self> {
        let el = Self {
            a,
            ecc,
            inc,
            raan,
            argp,
        };
        el.validate()?;
        Ok(el)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(OrbitError::InvalidElements(format!(
                "semi-major axis must be positive, got {}",
                self.a
            )));
        }
        if !(0.0..1.0).contains(&self.ecc) {
            return Err(OrbitError::InvalidElements(format!(
                "eccentricity must lie in [0, 1), got {}",
                self.ecc
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.inc) {
            return Err(OrbitError::InvalidElements(format!(
                "inclination must lie in [0, π], got {}",
                self.inc
            )));
        }
        if !(self.raan.is_finite() && self.argp.is_finite()) {
            return Err(OrbitError::InvalidElements("angles must be finite".into()));
        }
        Ok(())
    }
}

/// Wraps an angle into `[0, 2π)`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

pub fn elements_to_orbit(el: &KeplerElements, kappa2: f64) -> Result<EllipticOrbit> {
    el.validate()?;
    check_kappa2(kappa2)?;
    let (si, ci) = el.inc.sin_cos();
    let (so, co) = el.raan.sin_cos();
    let (sw, cw) = el.argp.sin_cos();

    let normal = Vec3::new(si * so, -si * co, ci);
    let pericenter = Vec3::new(co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si);
    let cmag = (kappa2 * el.a * (1.0 - el.ecc * el.ecc)).sqrt();
    EllipticOrbit::new(normal * cmag, el.ecc, pericenter, kappa2)
}

pub fn orbit_to_elements(orb: &EllipticOrbit) -> KeplerElements {
    let c = orb.c();
    let normal = c / c.norm();
    let inc = normal.z.clamp(-1.0, 1.0).acos();
    let node_len = normal.x.hypot(normal.y);
    let (raan, node) = if node_len > NODE_EPS {
        let raan = normal.x.atan2(-normal.y);
        (raan, Vec3::new(raan.cos(), raan.sin(), 0.0))
    } else {
        (0.0, Vec3::x())
    };
    let p = orb.edir();
    let argp = p.dot(&normal.cross(&node)).atan2(p.dot(&node));
    KeplerElements {
        a: orb.semi_major_axis(),
        ecc: orb.emag(),
        inc,
        raan: wrap_angle(raan),
        argp: wrap_angle(argp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn equatorial_unit_circle() {
        let el = KeplerElements::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let orb = elements_to_orbit(&el, 1.0).unwrap();
        assert_eq!(orb.c(), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(orb.emag(), 0.0);
        assert_eq!(orb.edir(), Vec3::x());
    }

    #[test]
    fn equatorial_ellipse() {
        let el = KeplerElements::new(2.0, 0.5, 0.0, 0.0, 0.0).unwrap();
        let orb = elements_to_orbit(&el, 1.0).unwrap();
        assert!((orb.c() - Vec3::new(0.0, 0.0, 1.5f64.sqrt())).norm() < 1e-15);
        assert_eq!(orb.emag(), 0.5);
        assert_eq!(orb.edir(), Vec3::x());
        let back = orbit_to_elements(&orb);
        assert!((back.a - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polar_orbit_node_convention() {
        // Ascending node on +x with prograde motion puts c on −y.
        let el = KeplerElements::new(1.0, 0.0, FRAC_PI_2, 0.0, 0.0).unwrap();
        let orb = elements_to_orbit(&el, 1.0).unwrap();
        assert!((orb.c() - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert!((orb.edir() - Vec3::x()).norm() < 1e-15);
    }

    #[test]
    fn orbit_to_elements_examples() {
        let orb = EllipticOrbit::new(Vec3::z(), 0.0, Vec3::x(), 1.0).unwrap();
        let el = orbit_to_elements(&orb);
        assert_eq!(
            (el.a, el.ecc, el.inc, el.raan, el.argp),
            (1.0, 0.0, 0.0, 0.0, 0.0)
        );

        let orb =
            EllipticOrbit::new(Vec3::new(0.0, 0.0, 1.5f64.sqrt()), 0.5, Vec3::x(), 1.0).unwrap();
        assert!((orbit_to_elements(&orb).a - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_elements() {
        assert!(KeplerElements::new(1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(KeplerElements::new(0.0, 0.1, 0.0, 0.0, 0.0).is_err());
        assert!(KeplerElements::new(1.0, -0.1, 0.0, 0.0, 0.0).is_err());
        assert!(KeplerElements::new(1.0, 0.1, 4.0, 0.0, 0.0).is_err());
        let bad = KeplerElements {
            a: -1.0,
            ecc: 0.0,
            inc: 0.0,
            raan: 0.0,
            argp: 0.0,
        };
        assert!(elements_to_orbit(&bad, 1.0).is_err());
    }

    #[test]
    fn degenerate_inclinations_round_trip() {
        for &inc in &[0.0, PI] {
            for &argp in &[0.0, 0.7, 3.0, 5.5] {
                let el = KeplerElements::new(1.3, 0.2, inc, 0.0, argp).unwrap();
                let back = orbit_to_elements(&elements_to_orbit(&el, 2.0).unwrap());
                assert!((back.inc - inc).abs() < 1e-12);
                assert_eq!(back.raan, 0.0);
                let d = (back.argp - argp).rem_euclid(TAU);
                assert!(
                    d.min(TAU - d) < 1e-12,
                    "inc {inc} argp {argp} -> {}",
                    back.argp
                );
            }
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(-0.0), 0.0);
        assert_eq!(wrap_angle(TAU), 0.0);
        assert!(wrap_angle(-1e-18) < TAU);
        assert!((wrap_angle(-FRAC_PI_2) - 3.0 * FRAC_PI_2).abs() < 1e-15);
    }
}
