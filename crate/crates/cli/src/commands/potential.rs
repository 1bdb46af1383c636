use std::f64::consts::PI;

use crat_core::clustering::ClusterKind;
use crat_core::fitting::{comparison_poles, sqrt_minimax};
use crat_core::potential::{log_abs_phi, strip_potential_bilinear, strip_potential_exact, tau, PointConfiguration, StripModel};
use num_complex::Complex64;

use super::Ctx;
use crate::args::PoleKind;
use crate::error::{CliError, CliResult};
use crate::output::{real, Check, Table};

const CURVE_POINTS: usize = 400;

pub fn phi_curves(ctx: &mut Ctx, kind: PoleKind, n: usize) -> CliResult<Vec<Check>> {
    if n == 0 {
        return Err(CliError::Invalid("n must be at least 1".into()));
    }
    let ck = match kind {
        PoleKind::Uniform => ClusterKind::Uniform,
        PoleKind::Tapered => ClusterKind::Tapered,
    };
    let fit = sqrt_minimax(ck, n)?;
    let nodes = fit.fit.interpolation_points();
    let poles = comparison_poles(ck, n)?;
    let cfg = PointConfiguration::real(&nodes, poles.poles())?;
    let mut t = Table::new(&["set", "abs_x", "log10_abs_phi"]);
    let (mut e_samples, mut g_samples) = (Vec::new(), Vec::new());
    for i in 0..CURVE_POINTS {
        let s = -15.0 + 15.0 * i as f64 / (CURVE_POINTS - 1) as f64;
        let x = 10f64.powf(s);
        for (set, z, bucket) in [("E", x, &mut e_samples), ("Gamma", -x, &mut g_samples)] {
            let z = Complex64::new(z, 0.0);
            // Samples landing on a node or pole have no finite logarithm and are left out.
            if let Ok(l) = log_abs_phi(&cfg, z) {
                t.row(vec![set.to_string(), real(x), real(l / std::f64::consts::LN_10)]);
                bucket.push(z);
            }
        }
    }
    ctx.out.csv("phi_curves.csv", &t)?;
    ctx.out.gnuplot(
        "phi_curves.gp",
        "set xlabel '|x|'\nset ylabel 'log10 |phi|'\nset logscale x\nplot 'phi_curves.csv' using ($1 eq 'E' ? $2 : 1/0):3 with lines title 'E = [0,1]', \\\n     '' using ($1 eq 'Gamma' ? $2 : 1/0):3 with lines title 'Gamma = [-1,0]'\n",
    )?;
    let est = tau(&cfg, &e_samples, &g_samples)?;
    println!(
        "phi curves: {} nodes, {} poles, tau {:.3e} (log {:.3}){}",
        nodes.len(),
        poles.len(),
        est.tau,
        est.log_tau,
        if est.vacuous { ", bound vacuous" } else { "" }
    );
    Ok(Vec::new())
}

pub fn strip(ctx: &mut Ctx, alpha: f64, n: usize, log_eps: f64) -> CliResult<Vec<Check>> {
    if !(log_eps < 0.0) {
        return Err(CliError::Invalid(format!("--log-eps must be negative, got {log_eps}")));
    }
    let m = StripModel::new(alpha, n, log_eps.exp())?;
    let mut t = Table::new(&["x", "y", "exact", "bilinear", "relative_gap"]);
    let mut worst: f64 = 0.0;
    let steps = (2.0 * -log_eps).round() as usize;
    for i in 0..=steps {
        let x = log_eps + 0.5 * i as f64;
        for j in 1..=7 {
            let y = PI * j as f64 / 8.0;
            let s = Complex64::new(x, y);
            let exact = strip_potential_exact(&m, s)?;
            let bilinear = strip_potential_bilinear(&m, s);
            let gap = (bilinear - exact).abs() / exact.abs();
            if x >= log_eps + 5.0 && x <= -5.0 {
                worst = worst.max(gap);
            }
            t.row(vec![real(x), real(y), real(exact), real(bilinear), real(gap)]);
        }
    }
    ctx.out.csv("strip.csv", &t)?;
    ctx.out.gnuplot(
        "strip.gp",
        "set xlabel 'x'\nset ylabel 'y'\nsplot 'strip.csv' using 1:2:3 with points title 'exact', '' using 1:2:4 with points title 'bilinear'\n",
    )?;
    println!("strip: max relative gap {worst:.4} on log eps + 5 <= x <= -5");
    let window = -5.0 - (log_eps + 5.0) >= 0.0;
    Ok(vec![Check::new(
        "bilinear within 5% of exact mid-strip",
        window && worst <= 0.05,
        if window { format!("max gap {worst:.4}") } else { "window empty for this log eps".into() },
    )])
}
