use std::f64::consts::{PI, SQRT_2};

use crat_core::clustering::{analyze_taper, lightning_poles, tapered_poles, uniform_poles, LIGHTNING_SIGMA};
use crat_core::quadrature::{build_rule, endpoint_distances, StepMode, TransformKind};

use super::Ctx;
use crate::args::DistanceKind;
use crate::error::{CliError, CliResult};
use crate::output::{real, Check, Table};

pub fn kind_name(kind: DistanceKind) -> &'static str {
    match kind {
        DistanceKind::Uniform => "uniform",
        DistanceKind::Tapered => "tapered",
        DistanceKind::Lightning => "lightning",
        DistanceKind::Tanh => "tanh",
        DistanceKind::TanhSinh => "tanh-sinh",
    }
}

/// Ascending distances: pole distances, or endpoint distances of one half of an `n`-point rule.
fn distances(kind: DistanceKind, n: usize, sigma: Option<f64>) -> CliResult<Vec<f64>> {
    let nf = n as f64;
    let d = match kind {
        DistanceKind::Uniform => uniform_poles(n, sigma.unwrap_or(PI / nf.sqrt()))?.distances(),
        DistanceKind::Tapered => tapered_poles(n, sigma.unwrap_or(SQRT_2 * PI))?.distances(),
        DistanceKind::Lightning => lightning_poles(n, sigma.unwrap_or(LIGHTNING_SIGMA))?.distances(),
        DistanceKind::Tanh | DistanceKind::TanhSinh => {
            let tk = if kind == DistanceKind::Tanh { TransformKind::Tanh } else { TransformKind::TanhSinh };
            let rule = build_rule(tk, n, StepMode::Default)?;
            let mut d = endpoint_distances(&rule)[..n / 2].to_vec();
            d.sort_by(|a, b| a.total_cmp(b));
            d
        }
    };
    Ok(d)
}

pub fn dump(ctx: &mut Ctx, kind: DistanceKind, n: usize, sigma: Option<f64>) -> CliResult<Vec<Check>> {
    if n < 4 {
        return Err(CliError::Invalid("cluster dump needs n >= 4".into()));
    }
    let d = distances(kind, n, sigma)?;
    let name = kind_name(kind);
    let mut t = Table::new(&["k", "d_k", "sqrt_k", "log_d_k"]);
    for (i, v) in d.iter().enumerate() {
        let k = i + 1;
        t.row(vec![k.to_string(), real(*v), real((k as f64).sqrt()), real(v.ln())]);
    }
    let file = format!("cluster_{name}.csv");
    ctx.out.csv(&file, &t)?;
    ctx.out.gnuplot(
        &format!("cluster_{name}.gp"),
        &format!("set xlabel 'sqrt(k)'\nset ylabel 'distance'\nset logscale y\nplot '{file}' using 3:2 with linespoints title '{name}'\n"),
    )?;
    let diag = analyze_taper(&d)?;
    println!("{name}: slope on sqrt(k) {:.6} (r2 {:.6}), slope on k {:.6} (r2 {:.6})", diag.slope_sqrtk, diag.r2_sqrtk, diag.slope_k, diag.r2_k);
    let detail = format!("r2 sqrt(k) {:.6}, r2 k {:.6}", diag.r2_sqrtk, diag.r2_k);
    Ok(match kind {
        DistanceKind::Tapered | DistanceKind::Lightning => {
            let sigma = sigma.unwrap_or(if kind == DistanceKind::Tapered { SQRT_2 * PI } else { LIGHTNING_SIGMA });
            let err = (diag.slope_sqrtk - sigma).abs() / sigma;
            vec![Check::new("taper constant recovered to 1e-10", err <= 1e-10, format!("relative error {err:.1e}"))]
        }
        DistanceKind::TanhSinh => {
            vec![Check::new("straight on sqrt(k) (r2 > 0.999, above r2 on k)", diag.r2_sqrtk > 0.999 && diag.r2_sqrtk > diag.r2_k, detail)]
        }
        DistanceKind::Tanh | DistanceKind::Uniform => vec![Check::new("straight on k (r2 > 0.999)", diag.r2_k > 0.999, detail)],
    })
}
