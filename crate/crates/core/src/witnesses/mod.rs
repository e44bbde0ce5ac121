//! Numerical witnesses of topological properties of the orbit spaces.
//!
//! * [`sphere_degree`] / [`orbit_sphere_obstruction`]: a 2-sphere of circular
//!   orbits whose direction map has degree 1, so it is not contractible in
//!   the orbit space although every sphere in `ℝ⁵` is.
//! * [`cauchy_circle_witness`] / [`completeness_probe`]: Cauchy sequences
//!   whose coordinate limit leaves the space.
//! * [`unbounded_components_witness`]: both complement components of the
//!   compact `h = −1` stratum of `H` contain points of arbitrarily large norm.

mod cauchy;
mod degree;
mod sphere;
mod unbounded;

pub use cauchy::{cauchy_circle_witness, completeness_probe, CauchyReport, Space};
pub use degree::{
    orbit_sphere_obstruction, signed_solid_angle, sphere_degree, DegreeReport, ObstructionReport,
    TestMap, DEGREE_TOLERANCE,
};
pub use sphere::TriangulatedSphere;
pub use unbounded::{unbounded_components_witness, UnboundedReport};
