//! One-command replications of the standard experiments, each in its own subdirectory.

use super::{approx, cluster, lightning, potential, quad, Ctx};
use crate::args::{Data, DistanceKind, Family, Integrand, PoleKind, QuadKind, Shape, SolveArgs, Xi};
use crate::error::CliResult;
use crate::output::{sqrt_n_plot, Check};

pub fn fig1(ctx: &Ctx) -> CliResult<Vec<Check>> {
    let mut sub = ctx.nested("fig1");
    let mut checks = Vec::new();
    let families = [Family::Newman, Family::Trap, Family::Stenger, Family::Ls, Family::Lawson];
    for f in families {
        checks.extend(approx::sweep(&mut sub, f, Xi::Classic)?);
    }
    let files: Vec<(String, &str)> = families.iter().map(|&f| (format!("sweep_{}.csv", approx::family_name(f)), approx::family_name(f))).collect();
    let refs: Vec<(&str, &str)> = files.iter().map(|(a, b)| (a.as_str(), *b)).collect();
    sub.out.gnuplot("fig1.gp", &sqrt_n_plot("approximation of sqrt(x) on [0,1]", &refs))?;
    Ok(checks)
}

pub fn fig4(ctx: &Ctx) -> CliResult<Vec<Check>> {
    let args = SolveArgs {
        polygon: None,
        shape: Some(Shape::Snowflake),
        data: Data::Logabs,
        data_file: None,
        z0: "0,0".into(),
        target: 1e-6,
        start: 6,
        max_dof: 4000,
        grid: 120,
    };
    lightning::solve(&mut ctx.nested("fig4"), &args)
}

pub fn fig6(ctx: &Ctx) -> CliResult<Vec<Check>> {
    let mut sub = ctx.nested("fig6");
    let mut checks = Vec::new();
    for (kind, n) in [(DistanceKind::Uniform, 50), (DistanceKind::Tapered, 50), (DistanceKind::Tanh, 40), (DistanceKind::TanhSinh, 40)] {
        checks.extend(cluster::dump(&mut sub, kind, n, None)?);
    }
    sub.out.gnuplot(
        "fig6.gp",
        "set xlabel 'sqrt(k)'\nset ylabel 'distance'\nset logscale y\nplot for [f in 'uniform tapered tanh tanh-sinh'] 'cluster_'.f.'.csv' using 3:2 with linespoints title f\n",
    )?;
    Ok(checks)
}

pub fn fig10(ctx: &Ctx) -> CliResult<Vec<Check>> {
    let mut checks = potential::phi_curves(&mut ctx.nested("fig10/uniform"), PoleKind::Uniform, 10)?;
    checks.extend(potential::phi_curves(&mut ctx.nested("fig10/tapered"), PoleKind::Tapered, 10)?);
    Ok(checks)
}

pub fn fig12(ctx: &Ctx) -> CliResult<Vec<Check>> {
    approx::fig12(&mut ctx.nested("fig12"))
}

pub fn fig13(ctx: &Ctx) -> CliResult<Vec<Check>> {
    let mut sub = ctx.nested("fig13");
    let mut checks = Vec::new();
    for kind in [QuadKind::Tanh, QuadKind::TanhSinh] {
        checks.extend(quad::sweep(&mut sub, kind, Integrand::Sqrt1px)?);
        checks.extend(quad::nodes(&mut sub, kind, 40)?);
    }
    sub.out.gnuplot(
        "fig13.gp",
        &sqrt_n_plot("quadrature of sqrt(1+x)", &[("quad_sweep_tanh.csv", "tanh"), ("quad_sweep_tanh-sinh.csv", "tanh-sinh")]),
    )?;
    Ok(checks)
}

pub fn fig14(ctx: &Ctx) -> CliResult<Vec<Check>> {
    let mut sub = ctx.nested("fig14");
    let mut checks = Vec::new();
    for kind in [QuadKind::Tanh, QuadKind::TanhSinh] {
        checks.extend(quad::gtm(&mut sub, kind, 40)?);
    }
    checks.extend(quad::l1_table(&mut sub)?);
    sub.out.gnuplot(
        "fig14.gp",
        "set xlabel 't + 1'\nset ylabel '|phi - r|'\nset logscale xy\nplot 'gtm_tanh.csv' using 2:3 with lines title 'tanh', 'gtm_tanh-sinh.csv' using 2:3 with lines title 'tanh-sinh'\n",
    )?;
    Ok(checks)
}
