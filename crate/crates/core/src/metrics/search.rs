//! Golden-section search on a bracket. Returns the best point evaluated,
//! which for a unimodal function is within `tol` of the optimum.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

pub(crate) fn golden_section_min(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub(crate) fn golden_section_max(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let (x, v) = golden_section_min(|x| -f(x), lo, hi, tol);
    (x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let (x, v) = golden_section_min(|x| (x - 0.3) * (x - 0.3) + 1.0, -1.0, 2.0, 1e-12);
        // The argmin of a smooth minimum is only resolved to about √ε.
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn finds_kink_minimum() {
        let (x, v) = golden_section_min(|x: f64| (x - 0.123).abs(), 0.0, 1.0, 1e-13);
        assert!((x - 0.123).abs() < 1e-12 && v < 1e-12);
    }

    #[test]
    fn maximizes() {
        let (x, v) = golden_section_max(|x: f64| x.cos(), -1.0, 0.5, 1e-12);
        assert!(x.abs() < 1e-6 && (v - 1.0).abs() < 1e-12);
    }
}
