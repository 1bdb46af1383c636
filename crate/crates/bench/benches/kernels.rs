use std::hint::black_box;

use crat_core::approximants::{newman, stenger_interpolant, trapezoidal_sqrt, XiMode};
use crat_core::clustering::ClusterKind;
use crat_core::fitting::sqrt_minimax;
use crat_core::lightning::{build_basis, evaluate_solution, solve, PolygonDomain};
use crat_core::quadrature::{build_rule, gtm_l1_norm, integrate_with_endpoints, StepMode, TransformKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

fn approximants(c: &mut Criterion) {
    let mut g = c.benchmark_group("approximants");
    for n in [10, 40] {
        let r = newman(n, XiMode::Classic).unwrap();
        g.bench_with_input(BenchmarkId::new("newman_eval", n), &r, |b, r| b.iter(|| r.eval(black_box(1e-7))));
        let r = trapezoidal_sqrt(n, None).unwrap();
        g.bench_with_input(BenchmarkId::new("trapezoidal_eval", n), &r, |b, r| b.iter(|| r.eval(black_box(1e-7))));
        g.bench_with_input(BenchmarkId::new("stenger_build", n), &n, |b, &n| b.iter(|| stenger_interpolant(f64::sqrt, n, None)));
    }
    g.finish();
}

fn lawson(c: &mut Criterion) {
    let mut g = c.benchmark_group("lawson");
    g.sample_size(10);
    for n in [10, 30] {
        g.bench_with_input(BenchmarkId::new("tapered", n), &n, |b, &n| b.iter(|| sqrt_minimax(ClusterKind::Tapered, n)));
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("quadrature");
    for kind in [TransformKind::Tanh, TransformKind::TanhSinh] {
        let rule = build_rule(kind, 40, StepMode::Default).unwrap();
        g.bench_function(format!("{kind:?}_sqrt1px_n40"), |b| b.iter(|| integrate_with_endpoints(&rule, |_, p, _| p.sqrt())));
        g.bench_function(format!("{kind:?}_l1_norm_n40"), |b| b.iter(|| gtm_l1_norm(&rule, -2.0, -1.0)));
    }
    g.finish();
}

fn lightning(c: &mut Criterion) {
    let mut g = c.benchmark_group("lightning");
    g.sample_size(10);
    let dom = PolygonDomain::l_shape();
    let z0 = Complex64::new(1.5, 1.5);
    let data = move |z: Complex64| (z - z0).norm().ln();
    let basis = build_basis(&dom, 12, 9).unwrap();
    g.bench_function("l_shape_solve_n12", |b| b.iter(|| solve(&dom, &basis, data, None)));
    let sol = solve(&dom, &basis, data, None).unwrap();
    g.bench_function("l_shape_evaluate", |b| b.iter(|| evaluate_solution(&dom, &basis, &sol, black_box(Complex64::new(0.5, 0.5)))));
    g.finish();
}

criterion_group!(benches, approximants, lawson, quadrature, lightning);
criterion_main!(benches);
