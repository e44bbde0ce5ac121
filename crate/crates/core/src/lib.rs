//! Keplerian orbit spaces.
//!
//! Orbits of the two-body problem are represented by their integrals of motion
//! `(c, e, h)`: angular momentum, Laplace vector and full energy. On top of
//! that representation the crate provides
//!
//! * [`orbit`]: integrals of motion, constraint residuals, classification,
//!   element conversions and a small RK4 propagator for sanity checks,
//! * [`charts`]: explicit homeomorphisms of orbit spaces onto tangent-bundle
//!   and sphere-product models, with their inverses,
//! * [`metrics`]: the eccentric-anomaly orbit metrics `ρ*_p` (marked
//!   pericenter) and `ρ_p` (shift-minimized pseudometric),
//! * [`witnesses`]: numerical witnesses of topological facts about these
//!   spaces (sphere degrees, Cauchy sequences without limit, unbounded
//!   complement components).
//!
//! All quantities use a caller supplied gravitational parameter `κ²`; there is
//! no global unit system.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charts;
pub mod checks;
pub mod error;
pub mod metrics;
pub mod orbit;
pub mod sampling;
pub mod witnesses;

pub use error::{OrbitError, Result};
pub use orbit::{
    EllipticOrbit, KeplerElements, OrbitClass, OrbitPoint, StateVector, Vec3, DEFAULT_KAPPA2,
};
