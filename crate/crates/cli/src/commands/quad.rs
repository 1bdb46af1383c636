use std::f64::consts::{E, SQRT_2};

use crat_core::quadrature::{
    build_rule, gtm_error_identity_check, gtm_l1_norm, integrate_with_endpoints, phi_minus_r_left, Contour, QuadratureRule, StepMode, TransformKind,
};
use crat_core::rate::{fit_rate_from, RateAxis};
use num_complex::Complex64;

use super::{within, Ctx};
use crate::args::{Integrand, QuadKind};
use crate::error::{CliError, CliResult};
use crate::output::{real, sqrt_n_plot, Check, Table};

pub fn transform(kind: QuadKind) -> TransformKind {
    match kind {
        QuadKind::Tanh => TransformKind::Tanh,
        QuadKind::TanhSinh => TransformKind::TanhSinh,
    }
}

pub fn kind_name(kind: QuadKind) -> &'static str {
    match kind {
        QuadKind::Tanh => "tanh",
        QuadKind::TanhSinh => "tanh-sinh",
    }
}

fn rule(kind: QuadKind, n: usize) -> CliResult<QuadratureRule> {
    if n == 0 {
        return Err(CliError::Invalid("n must be at least 1".into()));
    }
    Ok(build_rule(transform(kind), n, StepMode::Default)?)
}

fn integral_error(rule: &QuadratureRule, integrand: Integrand) -> crat_core::Result<f64> {
    Ok(match integrand {
        Integrand::Sqrt1px => (integrate_with_endpoints(rule, |_, p, _| p.sqrt())? - 4.0 * SQRT_2 / 3.0).abs(),
        Integrand::Exp => (integrate_with_endpoints(rule, |x, _, _| x.exp())? - (E - 1.0 / E)).abs(),
    })
}

pub fn sweep(ctx: &mut Ctx, kind: QuadKind, integrand: Integrand) -> CliResult<Vec<Check>> {
    let nmax = ctx.nmax_or(40);
    let name = kind_name(kind);
    let mut t = Table::new(&["n", "sqrt_n", "error"]);
    let mut errors = Vec::new();
    for n in 1..=nmax {
        let e = integral_error(&rule(kind, n)?, integrand)?;
        errors.push((n, e));
        t.row(vec![n.to_string(), real((n as f64).sqrt()), real(e)]);
    }
    let file = format!("quad_sweep_{name}.csv");
    ctx.out.csv(&file, &t)?;
    ctx.out.gnuplot(&format!("quad_sweep_{name}.gp"), &sqrt_n_plot(&format!("{name} quadrature"), &[(&file, name)]))?;
    let mut checks = Vec::new();
    if integrand == Integrand::Sqrt1px {
        match kind {
            QuadKind::Tanh => {
                // Exact results at tiny n are not on the asymptotic line, and zero errors cannot be fitted.
                let positive: Vec<(usize, f64)> = errors.iter().copied().filter(|e| e.1 > 0.0).collect();
                if let Ok(fit) = fit_rate_from(&positive, RateAxis::SqrtN, ctx.min_n) {
                    println!("{name}: slope {:.4} on sqrt(n)", fit.slope);
                    checks.push(Check::new("slope -pi +- 20%", within(fit.slope, -std::f64::consts::PI, 0.2), format!("slope {:.4}", fit.slope)));
                }
            }
            QuadKind::TanhSinh => {
                if let Some(&(_, e)) = errors.iter().find(|e| e.0 == 40) {
                    println!("{name}: error {e:.3e} at n = 40");
                    checks.push(Check::new("n = 40 error <= 1e-12", e <= 1e-12, format!("{e:.3e}")));
                }
            }
        }
    }
    Ok(checks)
}

pub fn nodes(ctx: &mut Ctx, kind: QuadKind, n: usize) -> CliResult<Vec<Check>> {
    let r = rule(kind, n)?;
    let name = kind_name(kind);
    let mut t = Table::new(&["k", "node", "weight", "one_plus", "one_minus", "distance"]);
    for k in 0..n {
        let d = r.one_plus[k].min(r.one_minus[k]);
        t.row(vec![k.to_string(), real(r.nodes[k]), real(r.weights[k]), real(r.one_plus[k]), real(r.one_minus[k]), real(d)]);
    }
    let file = format!("quad_nodes_{name}.csv");
    ctx.out.csv(&file, &t)?;
    ctx.out.gnuplot(
        &format!("quad_nodes_{name}.gp"),
        &format!("set xlabel 'k'\nset ylabel 'distance to endpoint'\nset logscale y\nplot '{file}' using 1:6 with points title '{name}'\n"),
    )?;
    Ok(Vec::new())
}

/// `log10` spaced offsets `delta` in `[1e-15, 1]`.
fn offsets(count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| 10f64.powf(-15.0 + 15.0 * i as f64 / (count - 1) as f64))
}

pub fn gtm(ctx: &mut Ctx, kind: QuadKind, n: usize) -> CliResult<Vec<Check>> {
    let r = rule(kind, n)?;
    let name = kind_name(kind);
    let mut t = Table::new(&["t", "delta", "abs_phi_minus_r"]);
    for delta in offsets(600) {
        t.row(vec![real(-1.0 - delta), real(delta), real(phi_minus_r_left(&r, delta)?.abs())]);
    }
    let file = format!("gtm_{name}.csv");
    ctx.out.csv(&file, &t)?;
    ctx.out.gnuplot(
        &format!("gtm_{name}.gp"),
        &format!("set xlabel 't + 1'\nset ylabel '|phi - r|'\nset logscale xy\nplot '{file}' using 2:3 with lines title '{name}'\n"),
    )?;
    let l1 = gtm_l1_norm(&r, -2.0, -1.0)?;
    let rect = Contour::Rectangle { x0: -2.0, x1: 2.0, y0: -1.0, y1: 1.0 };
    let check = gtm_error_identity_check(&r, |z: Complex64| z.exp(), rect, None)?;
    let rel = check.discrepancy() / check.lhs.abs().max(1.0);
    println!("{name} n = {n}: 1-norm over [-2,-1] {l1:.4e}; I - I_n = {:.6e}, contour gap {rel:.1e}", check.lhs);
    Ok(vec![Check::new("contour identity for exp(t) within 1e-8", rel <= 1e-8, format!("{rel:.1e}"))])
}

/// 1-norms over `[-2, -1]` for both rules and `n = 10, 20, 40`.
pub fn l1_table(ctx: &mut Ctx) -> CliResult<Vec<Check>> {
    let mut t = Table::new(&["kind", "n", "l1_norm"]);
    let mut tanh = Vec::new();
    let mut ts40 = f64::NAN;
    for kind in [QuadKind::Tanh, QuadKind::TanhSinh] {
        for n in [10, 20, 40] {
            let v = gtm_l1_norm(&rule(kind, n)?, -2.0, -1.0)?;
            t.row(vec![kind_name(kind).to_string(), n.to_string(), real(v)]);
            match kind {
                QuadKind::Tanh => tanh.push(v),
                QuadKind::TanhSinh if n == 40 => ts40 = v,
                QuadKind::TanhSinh => {}
            }
        }
    }
    ctx.out.csv("gtm_l1.csv", &t)?;
    let halving = tanh.windows(2).all(|w| w[1] <= 0.5 * w[0]);
    Ok(vec![
        Check::new("tanh 1-norm halves per doubling", halving, tanh.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")),
        Check::new("tanh-sinh smaller but within 10x at n = 40", ts40 < tanh[2] && 10.0 * ts40 > tanh[2], format!("{ts40:.3e} vs {:.3e}", tanh[2])),
    ])
}
