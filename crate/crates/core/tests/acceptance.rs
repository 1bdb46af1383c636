//! Acceptance checks 1 to 12. Each test prints one `criterion N: PASS|FAIL` line
//! with the measured quantities, then asserts the verdict.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use crat_core::approximants::{newman, stenger_interpolant, trapezoidal_default_step, trapezoidal_sqrt, RationalApproximant, XiMode};
use crat_core::clustering::{analyze_taper, tapered_poles, uniform_poles, ClusterKind};
use crat_core::fitting::{sqrt_minimax, sweep, MinimaxPoint};
use crat_core::grid::{sup_error_with, GradedGrid};
use crat_core::lightning::{build_basis, evaluate_solution, solve, PolygonDomain};
use crat_core::linalg::{lstsq, LstsqOptions, Matrix};
use crat_core::potential::{
    discrete_potential, log_abs_phi, predict_rates, strip_potential_bilinear, strip_potential_exact, PointConfiguration, StripModel,
};
use crat_core::quadrature::{
    build_rule, endpoint_distances, gtm_error_identity_check, gtm_l1_norm, integrate, integrate_with_endpoints, rule_rational,
    rule_rational_closed_form, Contour, StepMode, TransformKind,
};
use crat_core::rate::{fit_rate, RateAxis};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, checks: &[(&str, bool)], elapsed: Duration, budget: Duration, detail: String) {
    let timely = elapsed <= budget;
    let pass = timely && checks.iter().all(|c| c.1);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    println!(
        "criterion {id}: {} [{detail}; {:.2}s of {:.0}s]{}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
        if failed.is_empty() { String::new() } else { format!(" failed: {}", failed.join(", ")) }
    );
    assert!(timely, "criterion {id} exceeded its time budget");
    assert!(pass, "criterion {id} failed: {}", failed.join(", "));
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn sqrt_sup_error(r: &RationalApproximant) -> f64 {
    sup_error_with(f64::sqrt, |x| r.eval(x), &GradedGrid::reporting(-15.0)).unwrap().norm_inf()
}

#[test]
fn criterion_01_newman_rate() {
    let t = Instant::now();
    let errs: Vec<(usize, f64)> = (4..=20).map(|n| (n, sqrt_sup_error(&newman(n, XiMode::Classic).unwrap()))).collect();
    let fit = fit_rate(&errs, RateAxis::SqrtN).unwrap();
    report(
        1,
        &[("slope = -sqrt2 +- 20%", within(fit.slope, -SQRT_2, 0.2))],
        t.elapsed(),
        Duration::from_secs(5),
        format!("slope {:.4}, target {:.4}", fit.slope, -SQRT_2),
    );
}

#[test]
fn criterion_02_trapezoidal() {
    let t = Instant::now();
    let errs: Vec<(usize, f64)> = (4..=36).map(|n| (n, sqrt_sup_error(&trapezoidal_sqrt(n, None).unwrap()))).collect();
    let fit = fit_rate(&errs, RateAxis::SqrtN).unwrap();
    assert_eq!(trapezoidal_default_step(20), PI * (2.0f64 / 20.0).sqrt());
    let e20 = errs.iter().find(|e| e.0 == 20).unwrap().1;
    let model = (-PI * 10f64.sqrt()).exp();
    let factor = (e20 / model).max(model / e20);
    let target = -PI / SQRT_2;
    report(
        2,
        &[("n=20 within factor 5", factor <= 5.0), ("slope = -pi/sqrt2 +- 20%", within(fit.slope, target, 0.2))],
        t.elapsed(),
        Duration::from_secs(5),
        format!("e20 {e20:.3e} vs {model:.3e} (factor {factor:.2}), slope {:.4} target {target:.4}", fit.slope),
    );
}

#[test]
fn criterion_03_stenger() {
    let t = Instant::now();
    let mut worst_node: f64 = 0.0;
    let mut errs = Vec::new();
    for n in (4..=40).step_by(4) {
        let r = stenger_interpolant(f64::sqrt, n, None).unwrap();
        if let RationalApproximant::NodePole(ip) = &r {
            worst_node = worst_node.max(ip.node_residual());
        } else {
            panic!("Stenger interpolant has the wrong form");
        }
        errs.push((n, sqrt_sup_error(&r)));
    }
    let fit = fit_rate(&errs, RateAxis::SqrtN).unwrap();
    report(
        3,
        &[("node residual <= 1e-11", worst_node <= 1e-11), ("r2 > 0.98", fit.r2 > 0.98)],
        t.elapsed(),
        Duration::from_secs(5),
        format!("max node residual {worst_node:.2e}, sqrt(n) fit r2 {:.4}, slope {:.3}", fit.r2, fit.slope),
    );
}

struct Comparison {
    uniform: Vec<MinimaxPoint>,
    tapered: Vec<MinimaxPoint>,
    elapsed: Duration,
}

fn comparison() -> &'static Comparison {
    static CELL: OnceLock<Comparison> = OnceLock::new();
    CELL.get_or_init(|| {
        let t = Instant::now();
        let ns: Vec<usize> = (1..=25).map(|i| 2 * i).collect();
        let uniform = sweep(&ns, |n| sqrt_minimax(ClusterKind::Uniform, n)).unwrap();
        let tapered = sweep(&ns, |n| sqrt_minimax(ClusterKind::Tapered, n)).unwrap();
        Comparison { uniform, tapered, elapsed: t.elapsed() }
    })
}

fn slope_squared(pts: &[MinimaxPoint]) -> f64 {
    let e: Vec<(usize, f64)> = pts.iter().map(|p| (p.n, p.reported_error)).collect();
    fit_rate(&e, RateAxis::SqrtN).unwrap().slope_squared()
}

#[test]
fn criterion_04_uniform_vs_tapered_minimax() {
    let data = comparison();
    let (su, st) = (slope_squared(&data.uniform), slope_squared(&data.tapered));
    let ordered = data.uniform.iter().zip(&data.tapered).filter(|(u, _)| u.n >= 16).all(|(u, t)| t.reported_error < u.reported_error);
    report(
        4,
        &[
            ("uniform slope^2 = 2.3 +- 15%", within(su, 2.3, 0.15)),
            ("tapered slope^2 = 4.7 +- 15%", within(st, 4.7, 0.15)),
            ("tapered < uniform for n >= 16", ordered),
        ],
        data.elapsed,
        Duration::from_secs(120),
        format!(
            "uniform slope^2 {su:.3}, tapered {st:.3}, ratio {:.3}, n=50 errors {:.2e} / {:.2e}",
            st / su,
            data.uniform.last().unwrap().reported_error,
            data.tapered.last().unwrap().reported_error
        ),
    );
}

#[test]
fn criterion_05_taper_diagnostics() {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for n in [5, 20, 50, 200] {
        for sigma in [0.5, 2.0, SQRT_2 * PI, 4.0] {
            let d = analyze_taper(&tapered_poles(n, sigma).unwrap().distances()).unwrap();
            worst = worst.max((d.slope_sqrtk - sigma).abs() / sigma);
        }
    }
    let half = |kind| {
        let rule = build_rule(kind, 40, StepMode::Default).unwrap();
        let mut d: Vec<f64> = endpoint_distances(&rule)[..20].to_vec();
        d.sort_by(|a, b| a.total_cmp(b));
        analyze_taper(&d).unwrap()
    };
    let ts = half(TransformKind::TanhSinh);
    let th = half(TransformKind::Tanh);
    report(
        5,
        &[
            ("sigma recovered to 1e-10", worst <= 1e-10),
            ("tanh-sinh r2_sqrtk > 0.999", ts.r2_sqrtk > 0.999),
            ("tanh-sinh r2_sqrtk > r2_k", ts.r2_sqrtk > ts.r2_k),
            ("tanh r2_k > 0.999", th.r2_k > 0.999),
        ],
        t.elapsed(),
        Duration::from_secs(1),
        format!("sigma error {worst:.1e}; tanh-sinh r2 sqrt(k) {:.5} vs k {:.5}; tanh r2_k {:.6}", ts.r2_sqrtk, ts.r2_k, th.r2_k),
    );
}

#[test]
fn criterion_06_strip_model() {
    let t = Instant::now();
    let m = StripModel::new(0.5, 50, (-20.0f64).exp()).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let x = m.log_epsilon() + 5.0 + 0.5 * i as f64;
        for j in 1..=7 {
            let s = Complex64::new(x, PI * j as f64 / 8.0);
            let exact = strip_potential_exact(&m, s).unwrap();
            worst = worst.max((strip_potential_bilinear(&m, s) - exact).abs() / exact.abs());
        }
    }
    let step = 1e-3;
    let mut lap: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..=20 {
        for j in 1..=7 {
            let s = Complex64::new(m.log_epsilon() + i as f64, PI * j as f64 / 8.0);
            let u = |dx: f64, dy: f64| strip_potential_bilinear(&m, s + Complex64::new(dx, dy));
            let l = (u(step, 0.0) + u(-step, 0.0) + u(0.0, step) + u(0.0, -step) - 4.0 * u(0.0, 0.0)) / (step * step);
            lap = lap.max(l.abs());
            scale = scale.max(u(0.0, 0.0).abs());
        }
    }
    report(
        6,
        &[("mid-strip agreement within 5%", worst <= 0.05), ("discrete Laplacian <= 1e-6 scale", lap <= 1e-6 * scale)],
        t.elapsed(),
        Duration::from_secs(10),
        format!("max relative gap {worst:.4}, Laplacian {lap:.1e} (scale {scale:.3})"),
    );
}

#[test]
fn criterion_07_rate_predictions() {
    let t = Instant::now();
    let mut exact_ratio = true;
    for alpha in [0.25, 0.5, 1.0, 3.0] {
        for n in [1, 10, 50, 400] {
            let u = predict_rates(alpha, n, ClusterKind::Uniform).unwrap();
            let tp = predict_rates(alpha, n, ClusterKind::Tapered).unwrap();
            let ratio = (tp.accuracy.ln() / u.accuracy.ln()).powi(2);
            exact_ratio &= (ratio - 2.0).abs() <= 4.0 * f64::EPSILON && tp.rate_constant / u.rate_constant == 2.0;
        }
    }
    let elapsed = t.elapsed();
    let cu = predict_rates(0.5, 1, ClusterKind::Uniform).unwrap().rate_constant;
    let ct = predict_rates(0.5, 1, ClusterKind::Tapered).unwrap().rate_constant;
    let data = comparison();
    let (su, st) = (slope_squared(&data.uniform), slope_squared(&data.tapered));
    let (lo, hi) = (cu * 0.85, ct * 1.15);
    report(
        7,
        &[
            ("tapered/uniform exponent^2 ratio = 2", exact_ratio),
            ("uniform slope^2 in predicted bracket", su >= lo && su <= hi),
            ("tapered slope^2 in predicted bracket", st >= lo && st <= hi),
        ],
        elapsed,
        Duration::from_secs(1),
        format!("bracket [{lo:.3}, {hi:.3}] from predictions {cu:.3} / {ct:.3}; measured {su:.3} / {st:.3}"),
    );
}

#[test]
fn criterion_08_quadrature() {
    let t = Instant::now();
    let exact = 4.0 * SQRT_2 / 3.0;
    let errs: Vec<(usize, f64)> = (4..=40)
        .map(|n| {
            let rule = build_rule(TransformKind::Tanh, n, StepMode::Default).unwrap();
            (n, (integrate_with_endpoints(&rule, |_, p, _| p.sqrt()).unwrap() - exact).abs())
        })
        .collect();
    let fit = fit_rate(&errs, RateAxis::SqrtN).unwrap();
    let ts = build_rule(TransformKind::TanhSinh, 40, StepMode::Explicit(1.2 * (2.0 * PI * 40.0).ln() / 40.0)).unwrap();
    let ts_err = (integrate_with_endpoints(&ts, |_, p, _| p.sqrt()).unwrap() - exact).abs();
    report(
        8,
        &[("tanh slope = -pi +- 20%", within(fit.slope, -PI, 0.2)), ("tanh-sinh n=40 error <= 1e-12", ts_err <= 1e-12)],
        t.elapsed(),
        Duration::from_secs(1),
        format!("tanh slope {:.4}, tanh-sinh error {ts_err:.2e}", fit.slope),
    );
}

#[test]
fn criterion_09_gtm_identity() {
    let t = Instant::now();
    let rule = build_rule(TransformKind::Tanh, 20, StepMode::Default).unwrap();
    let rect = Contour::Rectangle { x0: -2.0, x1: 2.0, y0: -1.0, y1: 1.0 };
    let exp = gtm_error_identity_check(&rule, |z: Complex64| z.exp(), rect, None).unwrap();
    let pole = gtm_error_identity_check(&rule, |z: Complex64| (z - 3.0).inv(), rect, None).unwrap();
    let rel = |c: &crat_core::quadrature::GtmCheck| c.discrepancy() / c.lhs.abs().max(1.0);
    report(
        9,
        &[("exp(t) within 1e-8", rel(&exp) <= 1e-8), ("1/(t-3) within 1e-8", rel(&pole) <= 1e-8)],
        t.elapsed(),
        Duration::from_secs(5),
        format!("exp: lhs {:.6e} gap {:.1e}; 1/(t-3): lhs {:.6e} gap {:.1e}", exp.lhs, rel(&exp), pole.lhs, rel(&pole)),
    );
}

#[test]
fn criterion_10_gtm_l1() {
    let t = Instant::now();
    let norm = |kind, n| gtm_l1_norm(&build_rule(kind, n, StepMode::Default).unwrap(), -2.0, -1.0).unwrap();
    let tanh: Vec<f64> = [10, 20, 40].iter().map(|&n| norm(TransformKind::Tanh, n)).collect();
    let ts40 = norm(TransformKind::TanhSinh, 40);
    let halving = tanh.windows(2).all(|w| w[1] <= 0.5 * w[0]);
    report(
        10,
        &[("tanh halves per doubling", halving), ("tanh-sinh smaller but within 10x", ts40 < tanh[2] && ts40 * 10.0 > tanh[2])],
        t.elapsed(),
        Duration::from_secs(10),
        format!("tanh n=10,20,40: {:.3e}, {:.3e}, {:.3e}; tanh-sinh n=40: {ts40:.3e}", tanh[0], tanh[1], tanh[2]),
    );
}

#[test]
fn criterion_11_lightning() {
    let t = Instant::now();
    let dom = PolygonDomain::l_shape();
    let z0 = Complex64::new(1.5, 1.5);
    let g = move |z: Complex64| (z - z0).norm().ln();
    let mut reached = None;
    let mut l_history = Vec::new();
    for n in [6, 12, 24, 48] {
        let degree = ((6 * n) as f64).sqrt().round() as usize;
        let basis = build_basis(&dom, n, degree).unwrap();
        let sol = solve(&dom, &basis, g, None).unwrap();
        l_history.push(sol.boundary_residual);
        if sol.boundary_residual <= 1e-6 {
            reached = Some((n, basis, sol));
            break;
        }
    }
    let mut interior_ok = false;
    let mut interior = f64::NAN;
    if let Some((_, basis, sol)) = &reached {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        let mut count = 0;
        while count < 500 {
            let z = Complex64::new(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
            if dom.contains(z) {
                worst = worst.max((evaluate_solution(&dom, basis, sol, z).unwrap() - g(z)).abs());
                count += 1;
            }
        }
        interior = worst;
        interior_ok = worst <= 10.0 * sol.boundary_residual;
    }

    let flake = PolygonDomain::snowflake();
    let mut s_history = Vec::new();
    for n in [6, 12, 24, 48] {
        let degree = ((12 * n) as f64).sqrt().round() as usize;
        let basis = build_basis(&flake, n, degree).unwrap();
        s_history.push(solve(&flake, &basis, |z: Complex64| z.norm().ln(), None).unwrap().boundary_residual);
    }
    let monotone = s_history.windows(2).all(|w| w[1] < w[0]);
    let fmt = |h: &[f64]| h.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>().join(" ");
    report(
        11,
        &[
            ("L-shape residual <= 1e-6 at n <= 48", reached.is_some()),
            ("interior error <= 10x residual", interior_ok),
            ("snowflake >= 6 digits", *s_history.last().unwrap() <= 1e-6),
            ("snowflake residual decreases", monotone),
        ],
        t.elapsed(),
        Duration::from_secs(120),
        format!("L-shape residuals {} (n = 6,12,..), interior {interior:.1e}; snowflake residuals {}", fmt(&l_history), fmt(&s_history)),
    );
}

fn run(runner: &mut TestRunner, name: &str, failures: &mut Vec<String>, f: impl FnOnce(&mut TestRunner) -> Result<(), String>) {
    if let Err(e) = f(runner) {
        failures.push(format!("{name}: {e}"));
    }
}

#[test]
fn criterion_12_property_suites() {
    let t = Instant::now();
    let mut runner = TestRunner::new(Config { cases: 64, failure_persistence: None, ..Config::default() });
    let mut failures = Vec::new();

    run(&mut runner, "pole distances increase", &mut failures, |r| {
        r.run(&(1usize..120, 0.1f64..5.0), |(n, s)| {
            for set in [uniform_poles(n, s), tapered_poles(n, s)] {
                let d = set.unwrap().distances();
                prop_assert!(d.iter().all(|v| *v > 0.0 && *v <= 1.0));
                prop_assert!(d.windows(2).all(|w| w[0] < w[1]));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    run(&mut runner, "trapezoidal forms agree", &mut failures, |r| {
        r.run(&(1usize..60, -12.0f64..0.0), |(n, lx)| {
            let x = 10f64.powf(lx);
            let a = trapezoidal_sqrt(n, None).unwrap().eval(x).unwrap();
            let b = crat_core::approximants::trapezoidal_sqrt_direct(n, None, x).unwrap();
            prop_assert!((a - b).abs() <= 1e-13 * b.abs(), "{} vs {}", a, b);
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    run(&mut runner, "newman forms positive on (0,1]", &mut failures, |r| {
        r.run(&(1usize..40, -14.0f64..0.0), |(n, lx)| {
            let v = newman(n, XiMode::Classic).unwrap().eval(10f64.powf(lx)).unwrap();
            prop_assert!(v > 0.0 && v.is_finite());
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    run(&mut runner, "least-squares residual orthogonal", &mut failures, |r| {
        r.run(&(any::<u64>(), 3usize..30, 1usize..8), |(seed, m, k)| {
            let n = k.min(m);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a = Matrix::zeros(m, n);
            for i in 0..m {
                for j in 0..n {
                    a.set(i, j, rng.random_range(-1.0..1.0));
                }
            }
            let b: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let Ok(sol) = lstsq(&a, &b, LstsqOptions::default()) else { return Ok(()) };
            let ax = a.mul_vec(&sol.coeffs);
            for j in 0..n {
                let dot: f64 = (0..m).map(|i| a.get(i, j) * (b[i] - ax[i])).sum();
                prop_assert!(dot.abs() <= 1e-10);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    run(&mut runner, "quadrature symmetry, linearity and closed forms", &mut failures, |r| {
        r.run(&(1usize..80, any::<bool>(), -3.0f64..3.0, 0.1f64..3.0), |(n, ts, re, im)| {
            let kind = if ts { TransformKind::TanhSinh } else { TransformKind::Tanh };
            let rule = build_rule(kind, n, StepMode::Default).unwrap();
            for k in 0..n {
                prop_assert!(rule.nodes[k] == -rule.nodes[n - 1 - k]);
                prop_assert!(rule.weights[k] == rule.weights[n - 1 - k]);
            }
            let f = |x: f64| x.exp();
            let g = |x: f64| 1.0 / (x - 3.0);
            let lhs = integrate(&rule, |x| 2.0 * f(x) - 0.5 * g(x)).unwrap();
            let rhs = 2.0 * integrate(&rule, f).unwrap() - 0.5 * integrate(&rule, g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0));
            let z = Complex64::new(re, im);
            let a = rule_rational(&rule, z).unwrap();
            let b = rule_rational_closed_form(kind, n, rule.h, z).unwrap();
            prop_assert!((a - b).norm() <= 1e-13 * b.norm());
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    run(&mut runner, "potential matches log|phi|", &mut failures, |r| {
        r.run(&(1usize..50, -1.0f64..1.0, 0.05f64..2.0), |(n, re, im)| {
            let pts: Vec<f64> = (0..=n).map(|k| (k as f64 / n as f64).powi(2)).collect();
            let poles: Vec<f64> = tapered_poles(n, SQRT_2 * PI).unwrap().poles().to_vec();
            let cfg = PointConfiguration::real(&pts, &poles).unwrap();
            let z = Complex64::new(re, im);
            let u = discrete_potential(&cfg, z).unwrap();
            let l = log_abs_phi(&cfg, z).unwrap();
            prop_assert!(((u * cfg.degree() as f64).exp() - l.exp()).abs() <= 1e-10 * l.exp());
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    run(&mut runner, "lightning poles exterior", &mut failures, |r| {
        r.run(&(any::<u64>(), 1usize..30), |(seed, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.random_range(3..10);
            let verts: Vec<Complex64> = (0..k)
                .map(|j| Complex64::from_polar(rng.random_range(0.5..2.0), 2.0 * PI * (j as f64 + rng.random_range(0.0..0.5)) / k as f64))
                .collect();
            let Ok(dom) = PolygonDomain::new(verts) else { return Ok(()) };
            if let Ok(basis) = build_basis(&dom, n, 2) {
                prop_assert!(basis.poles().all(|p| dom.winding_number(*p) == 0));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
    });

    report(
        12,
        &[("cross-module property sweep", failures.is_empty())],
        t.elapsed(),
        Duration::from_secs(600),
        if failures.is_empty() { "7 property groups x 64 cases".to_string() } else { failures.join("; ") },
    );
}
