use std::f64::consts::TAU;

use orbit_spaces::checks::axiom_check;
use orbit_spaces::metrics::{
    rho, rho2_closed_form, rho_star, topology_probe, Exponent, MetricSpec,
};
use orbit_spaces::{sampling, EllipticOrbit, Vec3};

const P_SET: [Exponent; 3] = [
    Exponent::Finite(1.0),
    Exponent::Finite(2.0),
    Exponent::Infinity,
];

fn pairs(n: usize, seed: u64, emax: f64) -> Vec<(EllipticOrbit, EllipticOrbit)> {
    let mut rng = sampling::rng(seed);
    (0..n)
        .map(|_| {
            (
                sampling::elliptic_orbit(&mut rng, emax, 1.0),
                sampling::elliptic_orbit(&mut rng, emax, 1.0),
            )
        })
        .collect()
}

#[test]
fn quadrature_doubling_is_converged() {
    let coarse = MetricSpec::default();
    let fine = MetricSpec {
        n_u: 4096,
        ..coarse
    };
    for (o1, o2) in pairs(200, 1, 0.9) {
        let a = rho_star(&o1, &o2, &coarse).unwrap().value;
        let b = rho_star(&o1, &o2, &fine).unwrap().value;
        assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");
    }
}

#[test]
fn rotation_invariance() {
    let mut rng = sampling::rng(2);
    for (o1, o2) in pairs(30, 3, 0.9) {
        let rot = sampling::rotation(&mut rng);
        let turn = |o: &EllipticOrbit| {
            EllipticOrbit::new(rot * o.c(), o.emag(), rot * o.edir(), 1.0).unwrap()
        };
        let (t1, t2) = (turn(&o1), turn(&o2));
        for p in P_SET {
            let spec = MetricSpec::with_p(p);
            for metric in [rho, rho_star] {
                let a = metric(&o1, &o2, &spec).unwrap().value;
                let b = metric(&t1, &t2, &spec).unwrap().value;
                assert!((a - b).abs() <= 1e-9, "p={p}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn shift_minimum_is_below_marked_distance() {
    for (o1, o2) in pairs(40, 4, 0.9) {
        for p in P_SET {
            let spec = MetricSpec::with_p(p);
            let r = rho(&o1, &o2, &spec).unwrap();
            let s = rho_star(&o1, &o2, &spec).unwrap().value;
            assert!(r.value <= s + 1e-12);
            let shift = r.argmin_shift.unwrap();
            assert!((0.0..TAU).contains(&shift));
        }
    }
}

#[test]
fn reported_shift_applies_to_second_argument() {
    for (o1, o2) in pairs(20, 5, 0.8) {
        let spec = MetricSpec::default();
        let fwd = rho(&o1, &o2, &spec).unwrap();
        let back = rho(&o2, &o1, &spec).unwrap();
        assert_eq!(fwd.value, back.value);
        let (s1, s2) = (fwd.argmin_shift.unwrap(), back.argmin_shift.unwrap());
        let gap = (s1 + s2).rem_euclid(TAU);
        assert!(gap.min(TAU - gap) < 1e-6, "{s1} {s2}");
    }
}

#[test]
fn numerical_rho2_matches_closed_form() {
    let spec = MetricSpec::default();
    for (o1, o2) in pairs(100, 6, 0.95) {
        let closed = rho2_closed_form(&o1, &o2).unwrap().value;
        let num = rho(&o1, &o2, &spec).unwrap().value;
        assert!((num - closed).abs() <= 1e-8 * closed, "{num} vs {closed}");
    }
}

#[test]
fn small_axiom_run() {
    let rep = axiom_check(60, 9, 1.5, &MetricSpec::default()).unwrap();
    assert!(rep.passed, "{rep:#?}");
}

#[test]
fn metrics_agree_with_euclidean_topology() {
    let rep = topology_probe(300, 10, 1.0).unwrap();
    assert!(rep.vanishes, "{rep:#?}");
}

#[test]
fn concentric_circles_all_exponents() {
    let unit = EllipticOrbit::new(Vec3::z(), 0.0, Vec3::x(), 1.0).unwrap();
    let big = EllipticOrbit::new(Vec3::z() * 3f64.sqrt(), 0.0, Vec3::y(), 1.0).unwrap();
    for p in P_SET {
        let spec = MetricSpec::with_p(p);
        assert!((rho(&unit, &big, &spec).unwrap().value - 2.0).abs() < 1e-10);
    }
}
