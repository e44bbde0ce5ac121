use serde::{Deserialize, Serialize};

use crate::charts::NormalizedOrbitPoint;
use crate::error::{OrbitError, Result};
use crate::orbit::{check_kappa2, constraint_residuals, OrbitPoint, Vec3};
use crate::sampling;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnboundedReport {
    pub radius: f64,
    pub kappa2: f64,
    /// Escape points with `h < −1` at norms `R`, `10R`, `100R`.
    pub below: Vec<OrbitPoint>,
    /// Escape points with `h > −1` at the same scales.
    pub above: Vec<OrbitPoint>,
    pub below_norms: Vec<f64>,
    pub above_norms: Vec<f64>,
    /// Largest absolute constraint residual over all escape points.
    pub max_residual: f64,
    pub stratum_samples: usize,
    pub seed: u64,
    /// Largest `| |(c, e)| − 1 |` over the normalized `h = −1` samples.
    pub stratum_max_defect: f64,
    /// Largest `ℝ⁷` norm of a sample, in normalized coordinates.
    pub stratum_max_norm: f64,
    /// `√2`, the norm of every normalized point of the stratum.
    pub stratum_bound: f64,
    /// Norm bound `√(1 + max(1, κ⁴/2))` of the stratum in the original
    /// coordinates.
    pub stratum_bound_original: f64,
}

impl UnboundedReport {
    pub fn passed(&self) -> bool {
        self.below_norms
            .iter()
            .chain(&self.above_norms)
            .all(|&n| n > self.radius)
            && self.below.iter().all(|p| p.h < -1.0)
            && self.above.iter().all(|p| p.h > -1.0)
            && self.max_residual == 0.0
            && self.stratum_max_defect <= 1e-12
            && self.stratum_max_norm <= self.stratum_bound + 1e-12
    }
}

/// Linear orbits `c = 0, e = (1, 0, 0)` satisfy both orbit relations for
/// every energy, so `h = ∓T` with `T = √(R² − 1) + 1` gives points of norm
/// above `R` on either side of the compact stratum `h = −1`.
pub fn unbounded_components_witness(
    radius: f64,
    kappa2: f64,
    samples: usize,
    seed: u64,
) -> Result<UnboundedReport> {
    check_kappa2(kappa2)?;
    if !(radius > 2.0 && radius.is_finite()) {
        return Err(OrbitError::InvalidArgument(format!(
            "radius must exceed 2, got {radius}"
        )));
    }
    let scales = [radius, 10.0 * radius, 100.0 * radius];
    let escape = |sign: f64| -> Vec<OrbitPoint> {
        scales
            .iter()
            .map(|&r| {
                OrbitPoint::new(
                    Vec3::zeros(),
                    Vec3::x(),
                    sign * ((r * r - 1.0).sqrt() + 1.0),
                )
            })
            .collect()
    };
    let below = escape(-1.0);
    let above = escape(1.0);
    let max_residual = below
        .iter()
        .chain(&above)
        .map(|p| {
            let (r4, r5) = constraint_residuals(p, kappa2);
            r4.abs().max(r5.abs())
        })
        .fold(0.0, f64::max);

    let mut rng = sampling::rng(seed);
    let mut stratum_max_defect: f64 = 0.0;
    let mut stratum_max_norm: f64 = 0.0;
    for _ in 0..samples {
        let pt: NormalizedOrbitPoint = sampling::unit_energy_stratum_point(&mut rng);
        debug_assert!(pt.validate().is_ok());
        stratum_max_defect = stratum_max_defect.max((pt.ce_norm() - 1.0).abs());
        let norm = (pt.ce_norm().powi(2) + pt.h * pt.h).sqrt();
        stratum_max_norm = stratum_max_norm.max(norm);
    }

    Ok(UnboundedReport {
        radius,
        kappa2,
        below_norms: below.iter().map(OrbitPoint::norm).collect(),
        above_norms: above.iter().map(OrbitPoint::norm).collect(),
        below,
        above,
        max_residual,
        stratum_samples: samples,
        seed,
        stratum_max_defect,
        stratum_max_norm,
        stratum_bound: 2f64.sqrt(),
        stratum_bound_original: (1.0 + (kappa2 * kappa2 / 2.0).max(1.0)).sqrt(),
    })
}
