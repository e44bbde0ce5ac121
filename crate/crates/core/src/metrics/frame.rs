use serde::{Deserialize, Serialize};

use crate::orbit::{EllipticOrbit, Vec3};

/// Focus-centred parametrization `Q(u) = A + B cos u + C sin u` of an ellipse
/// by its eccentric anomaly `u`; `Q(0)` is the pericenter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseFrame {
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
}

impl EllipseFrame {
    pub fn position(&self, u: f64) -> Vec3 {
        let (s, c) = u.sin_cos();
        self.at(c, s)
    }

    #[inline]
    pub(crate) fn at(&self, cos_u: f64, sin_u: f64) -> Vec3 {
        self.a + self.b * cos_u + self.c * sin_u
    }

    /// Frame of `u ↦ Q(u + shift)`.
    pub fn shifted(&self, shift: f64) -> Self {
        let (s, c) = shift.sin_cos();
        Self {
            a: self.a,
            b: self.b * c + self.c * s,
            c: self.c * c - self.b * s,
        }
    }

    /// Frame of `u ↦ Q₁(u) − Q₂(u)`.
    pub fn difference(&self, other: &Self) -> Self {
        Self {
            a: self.a - other.a,
            b: self.b - other.b,
            c: self.c - other.c,
        }
    }

    /// Exact mean of `|Q(u)|²` over a period.
    pub fn mean_square(&self) -> f64 {
        self.a.norm_squared() + 0.5 * (self.b.norm_squared() + self.c.norm_squared())
    }
}

pub fn ellipse_frame(orb: &EllipticOrbit) -> EllipseFrame {
    let e = orb.emag();
    let a = orb.semi_major_axis();
    let p = orb.edir();
    let q = orb.c().cross(&p).normalize();
    EllipseFrame {
        a: p * (-a * e),
        b: p * a,
        c: q * (a * (1.0 - e * e).sqrt()),
    }
}
