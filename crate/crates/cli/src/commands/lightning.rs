use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crat_core::lightning::{evaluate_solution, solve_adaptive, PolygonDomain};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Ctx;
use crate::args::{Data, Shape, SolveArgs};
use crate::error::{CliError, CliResult};
use crate::output::{real, Check, Table};

const INTERIOR_CHECK_POINTS: usize = 500;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_point(s: &str) -> CliResult<Complex64> {
    let bad = || CliError::Invalid(format!("expected `x,y`, got `{s}`"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok(Complex64::new(x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

/// Piecewise-linear boundary data from one value per vertex.
fn vertex_data(domain: &PolygonDomain, text: &str) -> CliResult<impl Fn(Complex64) -> f64 + Sync> {
    let values = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<f64>().map_err(|_| CliError::Invalid(format!("bad vertex value `{l}`"))))
        .collect::<CliResult<Vec<f64>>>()?;
    if values.len() != domain.len() {
        return Err(CliError::Invalid(format!("{} vertex values for a polygon with {} vertices", values.len(), domain.len())));
    }
    let verts = domain.vertices().to_vec();
    Ok(move |z: Complex64| {
        let m = verts.len();
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..m {
            let (a, b) = (verts[i], verts[(i + 1) % m]);
            let ab = b - a;
            let t = (((z - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
            let d = (z - (a + ab * t)).norm();
            if d < best.0 {
                best = (d, values[i] + t * (values[(i + 1) % m] - values[i]));
            }
        }
        best.1
    })
}

type Boundary = Box<dyn Fn(Complex64) -> f64 + Sync>;

pub fn solve(ctx: &mut Ctx, args: &SolveArgs) -> CliResult<Vec<Check>> {
    let domain = match (&args.polygon, args.shape) {
        (Some(p), _) => PolygonDomain::from_csv(&read(p)?)?,
        (None, Some(Shape::L)) => PolygonDomain::l_shape(),
        (None, Some(Shape::Snowflake)) => PolygonDomain::snowflake(),
        (None, None) => return Err(CliError::Usage("either --polygon or --shape is required".into())),
    };
    if !(args.target > 0.0) {
        return Err(CliError::Invalid(format!("--target must be positive, got {}", args.target)));
    }
    let z0 = parse_point(&args.z0)?;
    // Data with a known harmonic extension into the domain can be checked inside.
    let (g, exact): (Boundary, bool) = match args.data {
        Data::Logabs => (Box::new(move |z: Complex64| (z - z0).norm().ln()), domain.is_exterior(z0)),
        Data::Rez2 => (Box::new(|z: Complex64| (z * z).re), true),
        Data::File => {
            let path = args.data_file.as_deref().ok_or_else(|| CliError::Usage("--data file needs --data-file".into()))?;
            (Box::new(vertex_data(&domain, &read(path)?)?), false)
        }
    };
    let out = solve_adaptive(&domain, &g, args.target, args.start, args.max_dof)?;
    let (basis, sol) = (&out.basis, &out.solution);

    let mut conv = Table::new(&["n_per_corner", "poly_degree", "dof", "sqrt_dof", "residual"]);
    for s in &out.history {
        conv.row(vec![s.n_per_corner.to_string(), s.poly_degree.to_string(), s.dof.to_string(), real((s.dof as f64).sqrt()), real(s.residual)]);
    }
    ctx.out.csv("convergence.csv", &conv)?;

    let mut poles = Table::new(&["corner", "re", "im"]);
    for (c, ps) in basis.corner_poles.iter().enumerate() {
        for p in ps {
            poles.row(vec![c.to_string(), real(p.re), real(p.im)]);
        }
    }
    ctx.out.csv("poles.csv", &poles)?;

    let verts = domain.vertices();
    let (x0, x1) = verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, v| (a.0.min(v.re), a.1.max(v.re)));
    let (y0, y1) = verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, v| (a.0.min(v.im), a.1.max(v.im)));
    let m = args.grid.max(2);
    let pts: Vec<Complex64> = (0..m)
        .flat_map(|j| (0..m).map(move |i| (i, j)))
        .map(|(i, j)| Complex64::new(x0 + (x1 - x0) * i as f64 / (m - 1) as f64, y0 + (y1 - y0) * j as f64 / (m - 1) as f64))
        .filter(|&z| domain.contains(z))
        .collect();
    let values: Vec<f64> = pts.par_iter().map(|&z| evaluate_solution(&domain, basis, sol, z)).collect::<crat_core::Result<_>>()?;
    let mut interior = Table::new(&["x", "y", "u"]);
    for (z, u) in pts.iter().zip(&values) {
        interior.row(vec![real(z.re), real(z.im), real(*u)]);
    }
    ctx.out.csv("interior.csv", &interior)?;

    let mut boundary = Table::new(&["x", "y"]);
    for v in verts.iter().chain(verts.first()) {
        boundary.row(vec![real(v.re), real(v.im)]);
    }
    ctx.out.csv("polygon.csv", &boundary)?;
    ctx.out.gnuplot(
        "convergence.gp",
        "set xlabel 'sqrt(DoF)'\nset ylabel 'boundary residual'\nset logscale y\nplot 'convergence.csv' using 4:5 with linespoints title 'residual'\n",
    )?;
    ctx.out.gnuplot(
        "solution.gp",
        "set size ratio -1\nset xlabel 'x'\nset ylabel 'y'\nplot 'interior.csv' using 1:2:3 with points pt 5 ps 0.5 palette title 'u', \\\n     'polygon.csv' using 1:2 with lines lc black title '', \\\n     'poles.csv' using 2:3 with points pt 7 ps 0.3 lc rgb 'red' title 'poles'\n",
    )?;

    let mut summary = String::new();
    writeln!(summary, "vertices = {}", domain.len()).unwrap();
    writeln!(summary, "n_per_corner = {}", basis.n_per_corner).unwrap();
    writeln!(summary, "poles = {}", basis.pole_count()).unwrap();
    writeln!(summary, "poly_degree = {}", basis.poly_degree).unwrap();
    writeln!(summary, "dof = {}", sol.dof).unwrap();
    writeln!(summary, "rank = {}", sol.rank).unwrap();
    writeln!(summary, "samples = {}", sol.samples).unwrap();
    writeln!(summary, "boundary_residual = {}", real(sol.boundary_residual)).unwrap();
    writeln!(summary, "reached_target = {}", out.reached_target).unwrap();
    ctx.out.text("summary.txt", &summary)?;
    println!(
        "lightning: {} poles, degree {}, {} DoF, residual {:.3e}{}",
        basis.pole_count(),
        basis.poly_degree,
        sol.dof,
        sol.boundary_residual,
        if out.reached_target { "" } else { " (target not reached)" }
    );

    let mut checks =
        vec![Check::new(format!("boundary residual <= {:e}", args.target), out.reached_target, format!("{:.3e}", sol.boundary_residual))];
    if exact {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut worst: f64 = 0.0;
        let mut count = 0;
        while count < INTERIOR_CHECK_POINTS {
            let z = Complex64::new(rng.random_range(x0..x1), rng.random_range(y0..y1));
            if domain.contains(z) {
                worst = worst.max((evaluate_solution(&domain, basis, sol, z)? - g(z)).abs());
                count += 1;
            }
        }
        checks.push(Check::new(
            "interior error <= 10x boundary residual",
            worst <= 10.0 * sol.boundary_residual,
            format!("{worst:.3e} on {INTERIOR_CHECK_POINTS} points"),
        ));
    }
    Ok(checks)
}
