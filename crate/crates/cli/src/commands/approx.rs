use std::f64::consts::{PI, SQRT_2};

use crat_core::approximants::{newman, stenger_interpolant, trapezoidal_sqrt, RationalApproximant, XiMode};
use crat_core::clustering::{uniform_poles, ClusterKind};
use crat_core::fitting::{least_squares_fit, sqrt_minimax, sweep as par_sweep, FitProblem, MinimaxPoint, MINIMAX_DECADE};
use crat_core::grid::{sup_error_with, GradedGrid};
use crat_core::rate::{fit_rate_from, RateAxis, RateFit};

use super::{within, Ctx};
use crate::args::{Family, Xi};
use crate::error::{CliError, CliResult};
use crate::output::{real, sqrt_n_plot, Check, Table};

fn sqrt_error(r: &RationalApproximant, grid: &GradedGrid) -> crat_core::Result<f64> {
    Ok(sup_error_with(f64::sqrt, |x| r.eval(x), grid)?.norm_inf())
}

pub fn family_error(family: Family, xi: Xi, n: usize, grid: &GradedGrid) -> crat_core::Result<f64> {
    let mode = match xi {
        Xi::Classic => XiMode::Classic,
        Xi::Improved => XiMode::Improved,
    };
    match family {
        Family::Newman => sqrt_error(&newman(n, mode)?, grid),
        Family::Trap => sqrt_error(&trapezoidal_sqrt(n, None)?, grid),
        Family::Stenger => sqrt_error(&stenger_interpolant(f64::sqrt, n, None)?, grid),
        Family::Ls => {
            let poles = uniform_poles(n, PI / (n as f64).sqrt())?;
            let fit = least_squares_fit(&FitProblem::new(f64::sqrt, poles, GradedGrid::fitting())?)?;
            fit.sup_error_on(f64::sqrt, grid)
        }
        Family::Lawson => Ok(sqrt_minimax(ClusterKind::Uniform, n)?.reported_error),
    }
}

pub fn family_name(family: Family) -> &'static str {
    match family {
        Family::Newman => "newman",
        Family::Trap => "trap",
        Family::Stenger => "stenger",
        Family::Ls => "ls",
        Family::Lawson => "lawson",
    }
}

fn rate(errors: &[(usize, f64)], min_n: usize) -> Option<RateFit> {
    fit_rate_from(errors, RateAxis::SqrtN, min_n).ok()
}

/// Checks backed by the acceptance criteria; the other families have none.
fn family_checks(family: Family, errors: &[(usize, f64)], min_n: usize) -> Vec<Check> {
    if matches!(family, Family::Ls | Family::Lawson) {
        return Vec::new();
    }
    let Some(fit) = rate(errors, min_n) else {
        return vec![Check::new("rate fit", false, "fewer than 3 points at n >= min-n")];
    };
    let detail = format!("slope {:.4}, r2 {:.4}", fit.slope, fit.r2);
    let mut checks = Vec::new();
    match family {
        Family::Newman => checks.push(Check::new("slope -sqrt2 +- 20%", within(fit.slope, -SQRT_2, 0.2), detail)),
        Family::Trap => {
            checks.push(Check::new("slope -pi/sqrt2 +- 20%", within(fit.slope, -PI / SQRT_2, 0.2), detail));
            if let Some(&(_, e)) = errors.iter().find(|e| e.0 == 20) {
                let model = (-PI * 10f64.sqrt()).exp();
                let factor = (e / model).max(model / e);
                checks.push(Check::new("n = 20 within factor 5 of exp(-pi sqrt 10)", factor <= 5.0, format!("factor {factor:.2}")));
            }
        }
        _ => checks.push(Check::new("root-exponential trend (r2 > 0.98)", fit.r2 > 0.98, detail)),
    }
    checks
}

pub fn sweep(ctx: &mut Ctx, family: Family, xi: Xi) -> CliResult<Vec<Check>> {
    let nmax = ctx.nmax_or(20);
    if nmax == 0 {
        return Err(CliError::Invalid("--nmax must be at least 1".into()));
    }
    let ns: Vec<usize> = (1..=nmax).collect();
    let grid = GradedGrid::reporting(MINIMAX_DECADE);
    let errors = par_sweep(&ns, |n| family_error(family, xi, n, &grid).map(|e| (n, e)))?;
    let name = family_name(family);
    let mut t = Table::new(&["n", "sqrt_n", "error"]);
    for &(n, e) in &errors {
        t.row(vec![n.to_string(), real((n as f64).sqrt()), real(e)]);
    }
    let file = format!("sweep_{name}.csv");
    ctx.out.csv(&file, &t)?;
    ctx.out.gnuplot(&format!("sweep_{name}.gp"), &sqrt_n_plot(&format!("{name} approximation of sqrt(x)"), &[(&file, name)]))?;
    if let Some(fit) = rate(&errors, ctx.min_n) {
        println!("{name}: n = 1..{nmax}, slope {:.4} on sqrt(n) (n >= {}), last error {:.3e}", fit.slope, ctx.min_n, errors[errors.len() - 1].1);
    }
    Ok(family_checks(family, &errors, ctx.min_n))
}

fn minimax_table(pts: &[MinimaxPoint]) -> Table {
    let mut t = Table::new(&["n", "sqrt_n", "error", "lawson_iterations", "converged", "equioscillation"]);
    for p in pts {
        t.row(vec![
            p.n.to_string(),
            real((p.n as f64).sqrt()),
            real(p.reported_error),
            p.fit.lawson_iterations.to_string(),
            p.fit.converged.to_string(),
            p.fit.equioscillation_count.to_string(),
        ]);
    }
    t
}

pub fn fig12(ctx: &mut Ctx) -> CliResult<Vec<Check>> {
    let nmax = ctx.nmax_or(50);
    if nmax < 6 {
        return Err(CliError::Invalid("fig12 needs --nmax of at least 6".into()));
    }
    let ns: Vec<usize> = (2..=nmax).step_by(2).collect();
    let uniform = par_sweep(&ns, |n| sqrt_minimax(ClusterKind::Uniform, n))?;
    let tapered = par_sweep(&ns, |n| sqrt_minimax(ClusterKind::Tapered, n))?;
    ctx.out.csv("fig12_uniform.csv", &minimax_table(&uniform))?;
    ctx.out.csv("fig12_tapered.csv", &minimax_table(&tapered))?;
    ctx.out.gnuplot("fig12.gp", &sqrt_n_plot("linear minimax for sqrt(x)", &[("fig12_uniform.csv", "uniform"), ("fig12_tapered.csv", "tapered")]))?;
    let errs = |pts: &[MinimaxPoint]| pts.iter().map(|p| (p.n, p.reported_error)).collect::<Vec<_>>();
    let (eu, et) = (errs(&uniform), errs(&tapered));
    let su = crat_core::rate::fit_rate(&eu, RateAxis::SqrtN)?.slope_squared();
    let st = crat_core::rate::fit_rate(&et, RateAxis::SqrtN)?.slope_squared();
    let ratio = st / su;
    println!("fig12: slope^2 uniform {su:.3}, tapered {st:.3}, ratio {ratio:.3}");
    let ordered = eu.iter().zip(&et).filter(|(u, _)| u.0 >= 16).all(|(u, t)| t.1 < u.1);
    Ok(vec![
        Check::new("slope^2 ratio 2 +- 15%", within(ratio, 2.0, 0.15), format!("ratio {ratio:.3}")),
        Check::new("tapered below uniform for n >= 16", ordered, String::new()),
    ])
}
