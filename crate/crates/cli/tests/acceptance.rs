//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::TAU;
use std::process::Command;
use std::time::Instant;

use orbit_catalog::{save_catalog, CatalogRecord, FileFormat};
use orbit_spaces::checks::{
    axiom_check, conservation_check, constraint_check, roundtrip_check, CONSTRAINT_TOL,
};
use orbit_spaces::metrics::{
    p_monotonicity_check, quotient_equal, rho, rho2_closed_form, rho_star, Exponent, MetricSpec,
};
use orbit_spaces::orbit::{constraint_residuals, integrals_of_motion};
use orbit_spaces::sampling;
use orbit_spaces::witnesses::{
    cauchy_circle_witness, completeness_probe, orbit_sphere_obstruction, sphere_degree,
    unbounded_components_witness, Space, TestMap, DEGREE_TOLERANCE,
};
use orbit_spaces::{EllipticOrbit, StateVector, Vec3};
use rand::Rng;

const SEED: u64 = 42;
const P_SET: [Exponent; 3] = [
    Exponent::Finite(1.0),
    Exponent::Finite(2.0),
    Exponent::Infinity,
];

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn constraint_fidelity() -> Verdict {
    let r = constraint_check(10_000, SEED).map_err(err)?;
    ensure(r.passed, || {
        format!("max scaled residual {:e}", r.max_scaled_residual)
    })?;

    // Parabolic hand case: r = x̂, v = √2 ŷ, κ² = 1 gives c = √2 ẑ, e = x̂, h = 0.
    let s = StateVector::new(Vec3::x(), Vec3::y() * 2f64.sqrt(), 1.0).map_err(err)?;
    let pt = integrals_of_motion(&s).map_err(err)?;
    let hand_c = Vec3::z() * 2f64.sqrt();
    ensure(
        (pt.c - hand_c).norm() < 1e-15 && (pt.e - Vec3::x()).norm() < 1e-15 && pt.h.abs() < 1e-15,
        || format!("parabolic case gave c={:?} e={:?} h={:e}", pt.c, pt.e, pt.h),
    )?;
    let (r4, r5) = constraint_residuals(&pt, 1.0);
    ensure(r4.abs().max(r5.abs()) <= CONSTRAINT_TOL, || {
        format!("parabolic residuals {r4:e}, {r5:e}")
    })?;
    Ok(format!(
        "max scaled residual {:.2e}; parabolic residuals {:.1e}, {:.1e}",
        r.max_scaled_residual, r4, r5
    ))
}

fn conservation() -> Verdict {
    let mut worst: f64 = 0.0;
    for ecc in [0.0, 0.5] {
        let r = conservation_check(ecc, 1e-4, None).map_err(err)?;
        let d = r.drift_h.max(r.drift_c).max(r.drift_e);
        ensure(r.passed && d <= 1e-6, || format!("ecc {ecc}: drift {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!(
        "max drift of (h, c, e) over one period {worst:.2e}"
    ))
}

fn chart_roundtrips() -> Verdict {
    let r = roundtrip_check(10_000, SEED).map_err(err)?;
    ensure(r.linear_samples > 0 && r.circular_samples > 0, || {
        "c = 0 or e = 0 stratum not sampled".into()
    })?;
    let worst = r
        .max_h_roundtrip
        .max(r.max_h_reverse_roundtrip)
        .max(r.max_manifold_residual)
        .max(r.max_curvilinear_roundtrip);
    ensure(r.passed && worst <= 1e-10, || format!("{r:?}"))?;
    Ok(format!(
        "H {:.1e}, reverse {:.1e}, manifold {:.1e}, curvilinear {:.1e} ({} linear, {} circular)",
        r.max_h_roundtrip,
        r.max_h_reverse_roundtrip,
        r.max_manifold_residual,
        r.max_curvilinear_roundtrip,
        r.linear_samples,
        r.circular_samples
    ))
}

fn metric_axioms() -> Verdict {
    let r = axiom_check(10_000, SEED, 1.0, &MetricSpec::default()).map_err(err)?;
    let bad: Vec<_> = r.stats.iter().filter(|s| !s.passed).collect();
    ensure(bad.is_empty(), || format!("{bad:?}"))?;
    let sym = r
        .stats
        .iter()
        .map(|s| s.max_symmetry_error)
        .fold(0.0, f64::max);
    let tri = r
        .stats
        .iter()
        .map(|s| s.max_triangle_excess)
        .fold(f64::NEG_INFINITY, f64::max);
    let slf = r
        .stats
        .iter()
        .map(|s| s.max_self_distance)
        .fold(0.0, f64::max);
    Ok(format!(
        "{} families; symmetry {sym:.1e}, triangle excess {tri:.3}, self {slf:.1e}",
        r.stats.len()
    ))
}

/// Positions from the true anomaly, `r = a(1 − e cos u)` along
/// `cos ν P + sin ν Q`.
fn anomaly_curve(o: &EllipticOrbit) -> impl Fn(f64) -> Vec3 {
    let e = o.emag();
    let a = o.c().norm_squared() / (o.kappa2() * (1.0 - e * e));
    let p = o.edir();
    let q = o.c().normalize().cross(&p);
    let k = ((1.0 + e) / (1.0 - e)).sqrt();
    move |u: f64| {
        let nu = 2.0 * (k * (u / 2.0).tan()).atan();
        (p * nu.cos() + q * nu.sin()) * (a * (1.0 - e * u.cos()))
    }
}

fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-11 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Brute-force `ρ₂`: trapezoid mean square on a fixed anomaly grid, a dense
/// scan of the shift and golden-section polishing of the best cell.
fn oracle_rho2(o1: &EllipticOrbit, o2: &EllipticOrbit) -> f64 {
    const N: usize = 64;
    const S: usize = 2048;
    let (q1, q2) = (anomaly_curve(o1), anomaly_curve(o2));
    let ms = |s: f64| {
        (0..N)
            .map(|j| {
                let u = TAU * j as f64 / N as f64;
                (q1(u) - q2(u + s)).norm_squared()
            })
            .sum::<f64>()
            / N as f64
    };
    let h = TAU / S as f64;
    let best = (0..S)
        .map(|j| (j, ms(j as f64 * h)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;
    let s0 = best as f64 * h;
    golden(ms, s0 - h, s0 + h).1.max(0.0).sqrt()
}

fn oracle_equivalence() -> Verdict {
    let mut rng = sampling::rng(SEED);
    let spec = MetricSpec::with_p(Exponent::Finite(2.0));
    let pairs: Vec<_> = (0..1000)
        .map(|_| {
            (
                sampling::elliptic_orbit(&mut rng, 0.9, 1.0),
                sampling::elliptic_orbit(&mut rng, 0.9, 1.0),
            )
        })
        .collect();
    let mut oracle_dev: f64 = 0.0;
    for (o1, o2) in &pairs[..100] {
        let closed = rho2_closed_form(o1, o2).map_err(err)?.value;
        let brute = oracle_rho2(o1, o2);
        oracle_dev = oracle_dev.max((closed - brute).abs() / brute.max(1e-300));
    }
    ensure(oracle_dev <= 1e-9, || {
        format!("closed form vs brute force {oracle_dev:e}")
    })?;
    let mut dev: f64 = 0.0;
    for (o1, o2) in &pairs {
        let closed = rho2_closed_form(o1, o2).map_err(err)?.value;
        let numeric = rho(o1, o2, &spec).map_err(err)?.value;
        dev = dev.max((numeric - closed).abs() / closed);
    }
    ensure(dev <= 1e-8, || format!("numerical vs closed form {dev:e}"))?;
    Ok(format!("closed form vs oracle {oracle_dev:.1e} (100 pairs); numerical vs closed form {dev:.1e} (1000 pairs)"))
}

fn quotient_behavior() -> Verdict {
    let mut rng = sampling::rng(SEED);
    let tol = MetricSpec::default().refine_tol;
    let (mut max_rho, mut min_star) = (0.0f64, f64::INFINITY);
    for _ in 0..200 {
        let n = sampling::unit_vector(&mut rng);
        let c = n * rng.gen_range(0.5..2.0);
        let m1 = sampling::orthogonal_unit(&mut rng, &n);
        let m2 = sampling::orthogonal_unit(&mut rng, &n);
        let o1 = EllipticOrbit::new(c, 0.0, m1, 1.0).map_err(err)?;
        let o2 = EllipticOrbit::new(c, 0.0, m2, 1.0).map_err(err)?;
        ensure(quotient_equal(&o1, &o2, 1e-12), || {
            "marks changed the quotient class".into()
        })?;
        for p in P_SET {
            let spec = MetricSpec::with_p(p);
            max_rho = max_rho.max(rho(&o1, &o2, &spec).map_err(err)?.value);
            if (m1 - m2).norm() > 1e-3 {
                min_star = min_star.min(rho_star(&o1, &o2, &spec).map_err(err)?.value);
            }
        }
    }
    ensure(max_rho <= tol, || format!("mark-only rho {max_rho:e}"))?;
    ensure(min_star > 0.0, || {
        "rho_star vanished between distinct marks".into()
    })?;

    let o1 = EllipticOrbit::new(Vec3::z(), 0.0, Vec3::x(), 1.0).map_err(err)?;
    let o2 = EllipticOrbit::new(Vec3::z(), 0.0, -Vec3::x(), 1.0).map_err(err)?;
    for p in P_SET {
        let spec = MetricSpec::with_p(p);
        let star = rho_star(&o1, &o2, &spec).map_err(err)?.value;
        let plain = rho(&o1, &o2, &spec).map_err(err)?.value;
        ensure((star - 2.0).abs() <= 1e-8 && star > 0.1, || {
            format!("p={p}: antipodal rho_star {star}")
        })?;
        ensure(plain <= tol, || format!("p={p}: antipodal rho {plain:e}"))?;
    }
    let other = EllipticOrbit::new(Vec3::z() * 1.1, 0.0, Vec3::x(), 1.0).map_err(err)?;
    ensure(
        quotient_equal(&o1, &o2, 1e-12) && !quotient_equal(&o1, &other, 1e-12),
        || "quotient_equal disagrees with rho".into(),
    )?;
    Ok(format!(
        "mark-only rho <= {max_rho:.1e}; min rho_star {min_star:.3}; antipodal rho_star = 2"
    ))
}

fn monotonicity() -> Verdict {
    let mut rng = sampling::rng(SEED);
    let spec = MetricSpec::default();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let o1 = sampling::elliptic_orbit(&mut rng, 0.9, 1.0);
        let o2 = sampling::elliptic_orbit(&mut rng, 0.9, 1.0);
        let r = p_monotonicity_check(&o1, &o2, &P_SET, &spec).map_err(err)?;
        for w in r.values.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
        ensure(r.monotone, || format!("{:?}", r.values))?;
    }
    ensure(worst <= 1e-9, || format!("violation {worst:e}"))?;
    Ok(format!("largest rho*_p - rho*_q for p < q: {worst:.2e}"))
}

fn degree_witness() -> Verdict {
    let mut parts = Vec::new();
    for map in [
        TestMap::Identity,
        TestMap::Antipodal,
        TestMap::Constant,
        TestMap::Winding(2),
    ] {
        let r = sphere_degree(|x| map.apply(x), 4).map_err(err)?;
        let off = (r.raw_sum - r.raw_sum.round()).abs();
        ensure(
            r.degree == map.expected_degree() && off <= DEGREE_TOLERANCE,
            || format!("{map:?}: degree {} raw {}", r.degree, r.raw_sum),
        )?;
        parts.push(format!("{}", r.degree));
    }
    for radius in [1.0, 5.0] {
        for field in [None, Some(Vec3::new(0.3, -0.7, 0.4))] {
            let r = orbit_sphere_obstruction(radius, 0.0, 4, field).map_err(err)?;
            ensure(r.degree.degree == 1, || {
                format!("obstruction at r={radius}: {}", r.degree.degree)
            })?;
        }
    }
    Ok(format!(
        "test maps {}; obstruction degree 1 at r = 1, 5",
        parts.join(", ")
    ))
}

fn incompleteness() -> Verdict {
    let spec = MetricSpec::default();
    let mut dev: f64 = 0.0;
    for p in P_SET {
        let r = cauchy_circle_witness(20, p, &spec).map_err(err)?;
        ensure(
            r.matches_closed_form && r.limit_candidate_excluded && r.terms_are_members,
            || format!("p={p}: deviation {:e}", r.max_deviation),
        )?;
        // Independent of the report's own comparison.
        for m in 1..=20 {
            for n in 1..=20 {
                let want = (1.0 / m as f64 - 1.0 / n as f64).abs();
                dev = dev.max((r.pairwise[m - 1][n - 1] - want).abs());
            }
        }
    }
    ensure(dev <= 10.0 * spec.refine_tol, || {
        format!("pairwise deviation {dev:e}")
    })?;
    for space in [Space::HFloor(0.0), Space::HFloor(2.0), Space::EStar] {
        let r = completeness_probe(space, 20, &spec).map_err(err)?;
        ensure(r.passed(), || format!("{space:?}: {r:?}"))?;
    }
    Ok(format!(
        "pairwise |1/m - 1/n| within {dev:.1e}; H(0), H(2), E* probes exclude their limits"
    ))
}

fn unbounded() -> Verdict {
    let mut defect: f64 = 0.0;
    for radius in [10.0, 100.0] {
        let r = unbounded_components_witness(radius, 1.0, 1000, SEED).map_err(err)?;
        ensure(r.passed(), || format!("R={radius}: {r:?}"))?;
        for (pts, below) in [(&r.below, true), (&r.above, false)] {
            ensure(!pts.is_empty(), || "no escape points".into())?;
            for pt in pts {
                ensure(pt.norm() > radius, || {
                    format!("norm {} <= {radius}", pt.norm())
                })?;
                ensure((pt.h < -1.0) == below, || {
                    format!("h = {} on the wrong side", pt.h)
                })?;
                let (r4, r5) = constraint_residuals(pt, 1.0);
                ensure(r4 == 0.0 && r5 == 0.0, || {
                    format!("residuals {r4:e}, {r5:e}")
                })?;
            }
        }
        defect = defect.max(r.stratum_max_defect);
    }
    ensure(defect <= 1e-12, || format!("stratum defect {defect:e}"))?;
    Ok(format!(
        "escape points beyond R = 10, 100 on both sides; stratum |(c,e)| defect {defect:.1e}"
    ))
}

fn cli_determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut rng = sampling::rng(SEED);
    let records: Vec<CatalogRecord> = (0..50)
        .map(|i| CatalogRecord {
            id: format!("obj{i:02}"),
            elements: sampling::kepler_elements(&mut rng, 0.9),
            kappa2: 1.0,
        })
        .collect();
    let path = dir.path().join("catalog.csv");
    save_catalog(&records, &path, FileFormat::Csv).map_err(err)?;
    let run = |threads: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_orbits"))
            .args([
                "matrix",
                "--catalog",
                path.to_str().unwrap(),
                "--threads",
                threads,
            ])
            .output()
            .map_err(err)?;
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        Ok(out.stdout)
    };
    let first = run("1")?;
    let second = run("1")?;
    let wide = run("8")?;
    ensure(first == second, || "two runs differ".into())?;
    ensure(first == wide, || "1 and 8 threads differ".into())?;
    Ok(format!(
        "{} bytes identical across runs and thread counts",
        first.len()
    ))
}

fn main() {
    // ACCEPTANCE_ONLY=<n> runs a single criterion.
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|v| v.parse().ok());
    let criteria: [Criterion; 11] = [
        ("constraint fidelity", constraint_fidelity),
        ("conservation", conservation),
        ("chart round-trips", chart_roundtrips),
        ("metric axioms", metric_axioms),
        ("oracle equivalence", oracle_equivalence),
        ("quotient behavior", quotient_behavior),
        ("monotonicity", monotonicity),
        ("degree witness", degree_witness),
        ("incompleteness witnesses", incompleteness),
        ("unbounded components", unbounded),
        ("CLI determinism", cli_determinism),
    ];
    let (mut passed, mut failed) = (0, 0);
    for (i, (name, check)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => {
                passed += 1;
                println!("criterion {:>2} {name}: PASS ({secs:.1}s) {detail}", i + 1);
            }
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.1}s) {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {passed} passed, {failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
