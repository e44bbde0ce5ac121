//! Composite trapezoid rule on the period `[0, 2π)`.
//!
//! For smooth periodic integrands the rule converges geometrically in the
//! node count, so doubling until two successive estimates agree is a reliable
//! stopping rule.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::rc::Rc;

use super::frame::EllipseFrame;
use super::search::golden_section_max;

pub(crate) const MAX_NODES: usize = 1 << 18;

type NodeTable = Rc<[(f64, f64)]>;

thread_local! {
    static TABLES: RefCell<HashMap<usize, NodeTable>> = RefCell::new(HashMap::new());
}

/// `(cos uᵢ, sin uᵢ)` for `uᵢ = 2πi/n`, cached per thread.
pub(crate) fn nodes(n: usize) -> NodeTable {
    TABLES.with(|t| {
        t.borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                (0..n)
                    .map(|i| {
                        let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
                        (c, s)
                    })
                    .collect()
            })
            .clone()
    })
}

#[inline]
fn pow_norm(v: nalgebra::Vector3<f64>, p: f64) -> f64 {
    let sq = v.norm_squared();
    if p == 2.0 {
        sq
    } else if p == 1.0 {
        sq.sqrt()
    } else {
        sq.powf(0.5 * p)
    }
}

fn power_sum(d: &EllipseFrame, p: f64, table: &[(f64, f64)], start: usize, step: usize) -> f64 {
    table[start..]
        .iter()
        .step_by(step)
        .map(|&(c, s)| pow_norm(d.at(c, s), p))
        .sum()
}

/// `(mean |D(u)|^p)^(1/p)` on `n` equispaced nodes.
pub(crate) fn power_mean_fixed(d: &EllipseFrame, p: f64, n: usize) -> f64 {
    let table = nodes(n);
    (power_sum(d, p, &table, 0, 1) / n as f64).powf(1.0 / p)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct MeanEstimate {
    pub value: f64,
    pub change: f64,
    pub nodes: usize,
}

/// Doubles the node count from `n0` until successive estimates differ by at
/// most `tol·(1 + value)`, reusing the previous nodes at each level.
pub(crate) fn power_mean_adaptive(d: &EllipseFrame, p: f64, n0: usize, tol: f64) -> MeanEstimate {
    let mut n = n0;
    let mut sum = power_sum(d, p, &nodes(n), 0, 1);
    let mut value = (sum / n as f64).powf(1.0 / p);
    let mut change = f64::INFINITY;
    while 2 * n <= MAX_NODES {
        let finer = nodes(2 * n);
        sum += power_sum(d, p, &finer, 1, 2);
        n *= 2;
        let next = (sum / n as f64).powf(1.0 / p);
        change = (next - value).abs();
        value = next;
        if change <= tol * (1.0 + value) {
            break;
        }
    }
    MeanEstimate {
        value,
        change,
        nodes: n,
    }
}

/// Indices of cyclic local extrema of `values`, best first. `better(x, y)`
/// says whether `x` is strictly preferable to `y`.
pub(crate) fn cyclic_extrema(
    values: &[f64],
    better: impl Fn(f64, f64) -> bool,
    limit: usize,
) -> Vec<usize> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| {
            let (prev, next) = (values[(i + n - 1) % n], values[(i + 1) % n]);
            !better(prev, values[i]) && !better(next, values[i])
        })
        .collect();
    idx.sort_by(|&i, &j| {
        if better(values[i], values[j]) {
            std::cmp::Ordering::Less
        } else if better(values[j], values[i]) {
            std::cmp::Ordering::Greater
        } else {
            i.cmp(&j)
        }
    });
    idx.truncate(limit);
    idx
}

/// Number of grid maxima refined when maximizing `|D(u)|`.
const MAX_CANDIDATES: usize = 2;

/// `max_u |D(u)|`: grid maximum on `n` nodes, then golden-section refinement
/// around the best local maxima to `u_tol`.
pub(crate) fn max_norm(d: &EllipseFrame, n: usize, u_tol: f64) -> (f64, f64) {
    let table = nodes(n);
    let sq: Vec<f64> = table
        .iter()
        .map(|&(c, s)| d.at(c, s).norm_squared())
        .collect();
    let h = TAU / n as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in cyclic_extrema(&sq, |x, y| x > y, MAX_CANDIDATES) {
        let u0 = i as f64 * h;
        if sq[i] > best.0 {
            best = (sq[i], u0);
        }
        let (u, v) = golden_section_max(|u| d.position(u).norm_squared(), u0 - h, u0 + h, u_tol);
        if v > best.0 {
            best = (v, u);
        }
    }
    (best.0.sqrt(), best.1.rem_euclid(TAU))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::Vec3;

    fn frame(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> EllipseFrame {
        EllipseFrame {
            a: Vec3::from(a),
            b: Vec3::from(b),
            c: Vec3::from(c),
        }
    }

    #[test]
    fn constant_integrand() {
        let d = frame([1.0, 0.0, 0.0], [0.0; 3], [0.0; 3]);
        for p in [1.0, 2.0, 3.5] {
            assert!((power_mean_fixed(&d, p, 16) - 1.0).abs() < 1e-15);
        }
        let est = power_mean_adaptive(&d, 1.0, 16, 1e-12);
        assert_eq!(est.nodes, 32);
    }

    #[test]
    fn mean_square_is_exact() {
        let d = frame([0.3, -0.2, 0.1], [1.0, 0.5, 0.0], [0.0, 0.7, -0.4]);
        let q = power_mean_fixed(&d, 2.0, 16).powi(2);
        assert!((q - d.mean_square()).abs() < 1e-14);
    }

    #[test]
    fn spectral_convergence_p1() {
        // |D(u)| for an ellipse about its centre; reference from 2^16 nodes.
        let d = frame([0.0; 3], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let reference = power_mean_fixed(&d, 1.0, 1 << 16);
        assert!((power_mean_fixed(&d, 1.0, 64) - reference).abs() < 1e-13);
        let est = power_mean_adaptive(&d, 1.0, 16, 1e-12);
        assert!((est.value - reference).abs() < 1e-12);
    }

    #[test]
    fn max_norm_refines_off_grid() {
        // |D|² = 1 + 0.5 cos(u − 0.3) peaks at u = 0.3, off every grid.
        let d = frame([0.0; 3], [0.0; 3], [0.0; 3]);
        let shifted = EllipseFrame {
            a: Vec3::new(1.0, 0.0, 0.0),
            b: Vec3::new(0.25 * 0.3f64.cos(), 0.0, 0.0),
            c: Vec3::new(0.25 * 0.3f64.sin(), 0.0, 0.0),
        };
        let (v, u) = max_norm(&shifted, 16, 1e-12);
        assert!((v - 1.25).abs() < 1e-14);
        assert!((u - 0.3).abs() < 1e-6);
        assert_eq!(max_norm(&d, 16, 1e-12).0, 0.0);
    }

    #[test]
    fn extrema_are_ranked() {
        let v = [3.0, 1.0, 2.0, 0.5, 4.0, 4.0];
        assert_eq!(cyclic_extrema(&v, |x, y| x < y, 5), vec![3, 1]);
        assert_eq!(cyclic_extrema(&v, |x, y| x > y, 5), vec![4, 5, 2]);
        assert_eq!(cyclic_extrema(&[1.0; 4], |x, y| x < y, 3), vec![0, 1, 2]);
    }
}
