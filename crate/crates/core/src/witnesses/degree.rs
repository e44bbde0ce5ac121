use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::sphere::TriangulatedSphere;
use crate::charts::chart_curvilinear;
use crate::error::{OrbitError, Result};
use crate::orbit::Vec3;

/// A reported degree is accepted when the raw sum is this close to an
/// integer.
pub const DEGREE_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: i64,
    /// Largest ratio of image edge length to domain edge length over faces,
    /// both measured as angles.
    pub max_face_distortion: f64,
    /// Signed area of the image triangulation divided by `4π`.
    pub raw_sum: f64,
    /// Largest `| |f(x)| − 1 |` before renormalization.
    pub max_norm_defect: f64,
    pub depth: u32,
    pub faces: usize,
}

/// Angle at `a` of the spherical triangle `abc`.
fn corner_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let tb = b - a * a.dot(b);
    let tc = c - a * a.dot(c);
    tb.cross(&tc).norm().atan2(tb.dot(&tc))
}

/// Signed solid angle of the spherical triangle `abc` of unit vectors:
/// spherical excess `A + B + C − π`, with the sign of `det(a, b, c)`.
pub fn signed_solid_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let det = a.dot(&b.cross(c));
    if det == 0.0 {
        return 0.0;
    }
    let excess = corner_angle(a, b, c) + corner_angle(b, c, a) + corner_angle(c, a, b) - PI;
    excess.max(0.0).copysign(det)
}

fn arc(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Brouwer degree of a map `S² → S²`, from the signed area of the image of an
/// icosphere of the given depth.
pub fn sphere_degree(map: impl Fn(&Vec3) -> Vec3, depth: u32) -> Result<DegreeReport> {
    if depth < 3 {
        return Err(OrbitError::InvalidArgument(format!(
            "subdivision depth must be at least 3, got {depth}"
        )));
    }
    let mesh = TriangulatedSphere::icosphere(depth);
    let mut max_norm_defect: f64 = 0.0;
    let mut image = Vec::with_capacity(mesh.vertices.len());
    for x in &mesh.vertices {
        let y = map(x);
        let n = y.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(OrbitError::InvalidArgument(format!(
                "map sent {x:?} to {y:?}, which cannot be projected to the sphere"
            )));
        }
        max_norm_defect = max_norm_defect.max((n - 1.0).abs());
        image.push(y / n);
    }

    let mut total = 0.0;
    let mut max_face_distortion: f64 = 0.0;
    for &[i, j, k] in &mesh.faces {
        let (a, b, c) = (&image[i], &image[j], &image[k]);
        total += signed_solid_angle(a, b, c);
        let (x, y, z) = (&mesh.vertices[i], &mesh.vertices[j], &mesh.vertices[k]);
        let domain = arc(x, y).max(arc(y, z)).max(arc(z, x));
        let target = arc(a, b).max(arc(b, c)).max(arc(c, a));
        max_face_distortion = max_face_distortion.max(target / domain);
    }
    let raw_sum = total / (4.0 * PI);
    let degree = raw_sum.round();
    if (raw_sum - degree).abs() > DEGREE_TOLERANCE {
        return Err(OrbitError::NonIntegralDegree { raw: raw_sum });
    }
    Ok(DegreeReport {
        degree: degree as i64,
        max_face_distortion,
        raw_sum,
        max_norm_defect,
        depth,
        faces: mesh.faces.len(),
    })
}

/// Maps `S² → S²` of known degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMap {
    Identity,
    Antipodal,
    /// Constant map onto `+z`.
    Constant,
    /// Longitude multiplied by `k` about the `z` axis: degree `k`.
    Winding(i32),
}

impl TestMap {
    pub fn apply(&self, x: &Vec3) -> Vec3 {
        match *self {
            TestMap::Identity => *x,
            TestMap::Antipodal => -x,
            TestMap::Constant => Vec3::z(),
            TestMap::Winding(k) => {
                let rho = x.x.hypot(x.y);
                if rho == 0.0 {
                    return *x;
                }
                let phi = x.y.atan2(x.x) * k as f64;
                Vec3::new(rho * phi.cos(), rho * phi.sin(), x.z)
            }
        }
    }

    pub fn expected_degree(&self) -> i64 {
        match *self {
            TestMap::Identity => 1,
            TestMap::Antipodal => -1,
            TestMap::Constant => 0,
            TestMap::Winding(k) => k as i64,
        }
    }

    pub fn parse(name: &str, k: i32) -> Option<Self> {
        match name {
            "identity" => Some(TestMap::Identity),
            "antipodal" => Some(TestMap::Antipodal),
            "constant" => Some(TestMap::Constant),
            "winding" => Some(TestMap::Winding(k)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub radius: f64,
    pub floor: f64,
    pub perturbed: bool,
    /// Largest `|c · e|` over the family; zero means every orbit satisfies
    /// the orthogonality relation exactly.
    pub max_orthogonality_residual: f64,
    /// Smallest `|c| − b` over the family; positive means the family lies in
    /// `H(b)`.
    pub min_radius_margin: f64,
    pub degree: DegreeReport,
}

/// Degree of the composite `S² → H(b) → S²`, `n ↦ (c = r·n, e) ↦ c/|c|`,
/// with `e = 0` or, when `tangent_field` is given, `e = 0.1·(w − (w·n) n)`.
pub fn orbit_sphere_obstruction(
    radius: f64,
    floor: f64,
    depth: u32,
    tangent_field: Option<Vec3>,
) -> Result<ObstructionReport> {
    if !(floor >= 0.0 && radius > floor && radius.is_finite()) {
        return Err(OrbitError::InvalidArgument(format!(
            "sphere radius {radius} must exceed the floor b = {floor} ≥ 0"
        )));
    }
    let max_dot = Cell::new(0.0f64);
    let min_margin = Cell::new(f64::INFINITY);
    let failure = Cell::new(false);
    let map = |n: &Vec3| {
        let c = n * radius;
        let e = match tangent_field {
            Some(w) => (w - n * n.dot(&w)) * 0.1,
            None => Vec3::zeros(),
        };
        max_dot.set(max_dot.get().max(c.dot(&e).abs()));
        min_margin.set(min_margin.get().min(c.norm() - floor));
        match chart_curvilinear(&c, &e, floor) {
            Ok(tc) => tc.base,
            Err(_) => {
                failure.set(true);
                *n
            }
        }
    };
    let degree = sphere_degree(map, depth)?;
    if failure.get() {
        return Err(OrbitError::ChartDomain(
            "a family member left the chart domain".into(),
        ));
    }
    Ok(ObstructionReport {
        radius,
        floor,
        perturbed: tangent_field.is_some(),
        max_orthogonality_residual: max_dot.get(),
        min_radius_margin: min_margin.get(),
        degree,
    })
}
