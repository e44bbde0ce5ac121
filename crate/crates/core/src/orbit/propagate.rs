//! Fixed-step RK4 integration of `r̈ = −κ² r / |r|³`.
//!
//! Only used to check that the integrals of motion are conserved; there is no
//! step control and no event handling.

use super::{integrals_of_motion, OrbitPoint, StateVector, Vec3};
use crate::error::{OrbitError, Result};

pub const DEFAULT_MIN_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk4Propagator {
    pub dt: f64,
    /// Integration aborts once `|r|` drops below this value.
    pub min_radius: f64,
}

/// Largest deviation of `(h, c, e)` from their initial values along a
/// trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct Drift {
    pub h: f64,
    pub c: f64,
    pub e: f64,
}

impl Drift {
    pub fn max(&self) -> f64 {
        self.h.max(self.c).max(self.e)
    }

    fn update(&mut self, start: &OrbitPoint, now: &OrbitPoint) {
        self.h = self.h.max((now.h - start.h).abs());
        self.c = self.c.max((now.c - start.c).norm());
        self.e = self.e.max((now.e - start.e).norm());
    }
}

impl Rk4Propagator {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(OrbitError::InvalidArgument(format!(
                "time step must be positive, got {dt}"
            )));
        }
        Ok(Self {
            dt,
            min_radius: DEFAULT_MIN_RADIUS,
        })
    }

    pub fn with_min_radius(mut self, min_radius: f64) -> Self {
        self.min_radius = min_radius;
        self
    }

    fn accel(kappa2: f64, r: &Vec3) -> Vec3 {
        let n = r.norm();
        -r * (kappa2 / (n * n * n))
    }

    fn step(&self, s: &StateVector) -> StateVector {
        let k = s.kappa2;
        let dt = self.dt;
        let (r, v) = (s.r, s.v);
        let a1 = Self::accel(k, &r);
        let (r2, v2) = (r + v * (0.5 * dt), v + a1 * (0.5 * dt));
        let a2 = Self::accel(k, &r2);
        let (r3, v3) = (r + v2 * (0.5 * dt), v + a2 * (0.5 * dt));
        let a3 = Self::accel(k, &r3);
        let (r4, v4) = (r + v3 * dt, v + a3 * dt);
        let a4 = Self::accel(k, &r4);
        StateVector {
            r: r + (v + v2 * 2.0 + v3 * 2.0 + v4) * (dt / 6.0),
            v: v + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (dt / 6.0),
            kappa2: k,
        }
    }

    fn guard(&self, s: &StateVector, step: usize) -> Result<()> {
        let radius = s.r.norm();
        if radius < self.min_radius || !radius.is_finite() {
            return Err(OrbitError::NearCollision {
                step,
                radius,
                floor: self.min_radius,
            });
        }
        Ok(())
    }

    pub fn propagate(&self, state: &StateVector, steps: usize) -> Result<StateVector> {
        let mut s = *state;
        self.guard(&s, 0)?;
        for i in 0..steps {
            s = self.step(&s);
            self.guard(&s, i + 1)?;
        }
        Ok(s)
    }

    /// Propagates and records the drift of the integrals of motion after
    /// every step.
    pub fn propagate_with_drift(
        &self,
        state: &StateVector,
        steps: usize,
    ) -> Result<(StateVector, Drift)> {
        let start = integrals_of_motion(state)?;
        let mut drift = Drift::default();
        let mut s = *state;
        self.guard(&s, 0)?;
        for i in 0..steps {
            s = self.step(&s);
            self.guard(&s, i + 1)?;
            drift.update(&start, &integrals_of_motion(&s)?);
        }
        Ok((s, drift))
    }
}

pub fn propagate(state: &StateVector, dt: f64, steps: usize) -> Result<StateVector> {
    Rk4Propagator::new(dt)?.propagate(state, steps)
}
