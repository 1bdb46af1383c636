//! Laplace problems on polygons solved by least-squares fits with real and
//! imaginary parts of `1/(z - p)`, poles clustered outside each corner, plus a
//! polynomial.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::clustering::{lightning_poles, LIGHTNING_SIGMA};
use crate::error::{invalid, Error, Result};
use crate::linalg::{lstsq, LstsqOptions, Matrix, RankPolicy};

/// Counterclockwise simple polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonDomain {
    vertices: Vec<Complex64>,
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: Complex64, b: Complex64, p: Complex64, d: f64| {
        d == 0.0 && p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let t = (((z - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

impl PolygonDomain {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(invalid("a polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(invalid("polygon vertices must be finite"));
        }
        for i in 0..n {
            if vertices[i + 1..].contains(&vertices[i]) {
                return Err(invalid(format!("vertex {i} is repeated")));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]) {
                    return Err(invalid(format!("edges {i} and {j} intersect")));
                }
            }
        }
        let area2: f64 = (0..n).map(|i| cross(vertices[i], vertices[(i + 1) % n])).sum();
        if area2 <= 0.0 {
            return Err(invalid("polygon vertices must be ordered counterclockwise"));
        }
        Ok(Self { vertices })
    }

    /// Parses one `x,y` vertex per line; blank lines and `#` comments are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut v = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let (Some(x), Some(y), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(invalid(format!("line {}: expected `x,y`", i + 1)));
            };
            let parse = |s: &str| s.parse::<f64>().map_err(|_| invalid(format!("line {}: bad number `{s}`", i + 1)));
            v.push(Complex64::new(parse(x)?, parse(y)?));
        }
        Self::new(v)
    }

    /// The L-shaped hexagon `0, 2, 2+i, 1+i, 1+2i, 2i`.
    pub fn l_shape() -> Self {
        let v = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)];
        Self::new(v.iter().map(|&(x, y)| Complex64::new(x, y)).collect()).expect("static polygon")
    }

    /// Twelve-cornered star: radii alternating `1` and `1/sqrt 3` at angles `k pi / 6`.
    pub fn snowflake() -> Self {
        let v = (0..12)
            .map(|k| {
                let r = if k % 2 == 0 { 1.0 } else { 1.0 / 3f64.sqrt() };
                Complex64::from_polar(r, k as f64 * PI / 6.0)
            })
            .collect();
        Self::new(v).expect("static polygon")
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edge(&self, i: usize) -> (Complex64, Complex64) {
        (self.vertices[i], self.vertices[(i + 1) % self.len()])
    }

    /// Mean of the vertices.
    pub fn center(&self) -> Complex64 {
        self.vertices.iter().sum::<Complex64>() / self.len() as f64
    }

    /// Largest vertex distance from [`Self::center`].
    pub fn radius(&self) -> f64 {
        let c = self.center();
        self.vertices.iter().map(|v| (v - c).norm()).fold(0.0, f64::max)
    }

    fn scale(&self) -> f64 {
        self.radius().max(f64::MIN_POSITIVE)
    }

    /// Shorter of the two edges meeting at corner `i`.
    pub fn corner_scale(&self, i: usize) -> f64 {
        let n = self.len();
        let (prev, v, next) = (self.vertices[(i + n - 1) % n], self.vertices[i], self.vertices[(i + 1) % n]);
        (v - prev).norm().min((next - v).norm())
    }

    /// Unit vector bisecting the exterior angle at corner `i`.
    pub fn exterior_bisector(&self, i: usize) -> Complex64 {
        let n = self.len();
        let (prev, v, next) = (self.vertices[(i + n - 1) % n], self.vertices[i], self.vertices[(i + 1) % n]);
        let out = |e: Complex64| -Complex64::i() * e / e.norm();
        let b = out(v - prev) + out(next - v);
        if b.norm() == 0.0 {
            // Straight angle: the outward normal.
            out(v - prev)
        } else {
            b / b.norm()
        }
    }

    /// Winding number of the boundary about `z` (`z` off the boundary).
    pub fn winding_number(&self, z: Complex64) -> i64 {
        let mut total = 0.0;
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            total += ((b - z) / (a - z)).arg();
        }
        (total / (2.0 * PI)).round() as i64
    }

    /// Distance from `z` to the boundary.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                point_segment_distance(z, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `z` lies strictly inside.
    pub fn contains(&self, z: Complex64) -> bool {
        if !z.is_finite() || self.boundary_distance(z) <= 1e-14 * self.scale() {
            return false;
        }
        self.winding_number(z) != 0
    }

    /// Whether `z` lies strictly outside the closed polygon.
    pub fn is_exterior(&self, z: Complex64) -> bool {
        z.is_finite() && self.boundary_distance(z) > 1e-14 * self.scale() && self.winding_number(z) == 0
    }

    /// Boundary points with corner-graded spacing and trapezoid arc weights.
    ///
    /// On each edge, parameter values `t` combine `m` points
    /// `(1/2) exp(-4 (sqrt m - sqrt k))` graded toward each end with `m`
    /// uniform points per half edge.
    pub fn boundary_samples(&self, m: usize) -> (Vec<Complex64>, Vec<f64>) {
        let m = m.max(1);
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        let sm = (m as f64).sqrt();
        let mut ts: Vec<f64> = Vec::with_capacity(4 * m);
        for k in 1..=m {
            let graded = 0.5 * (-LIGHTNING_SIGMA * (sm - (k as f64).sqrt())).exp();
            let uniform = 0.5 * k as f64 / m as f64;
            ts.extend([graded, 1.0 - graded, uniform, 1.0 - uniform]);
        }
        ts.retain(|t| *t > 0.0 && *t < 1.0);
        ts.sort_by(|a, b| a.total_cmp(b));
        ts.dedup();
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            let len = (b - a).norm();
            for j in 0..ts.len() {
                let lo = if j == 0 { 0.0 } else { ts[j - 1] };
                let hi = if j + 1 == ts.len() { 1.0 } else { ts[j + 1] };
                pts.push(a + (b - a) * ts[j]);
                wts.push(0.5 * (hi - lo) * len);
            }
        }
        (pts, wts)
    }
}

/// Poles clustered at the corners plus a polynomial of degree `poly_degree`
/// in `(z - center) / radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct LightningBasis {
    pub corner_poles: Vec<Vec<Complex64>>,
    pub poly_degree: usize,
    pub center: Complex64,
    pub radius: f64,
    pub n_per_corner: usize,
}

impl LightningBasis {
    pub fn poles(&self) -> impl Iterator<Item = &Complex64> {
        self.corner_poles.iter().flatten()
    }

    pub fn pole_count(&self) -> usize {
        self.corner_poles.iter().map(Vec::len).sum()
    }

    /// Real coefficients: two per pole, `2 (m + 1) - 1` for the polynomial.
    pub fn dof(&self) -> usize {
        2 * self.pole_count() + 2 * (self.poly_degree + 1) - 1
    }

    fn poly_columns(&self) -> usize {
        2 * self.poly_degree + 1
    }

    /// Row of basis function values at `z`.
    fn row(&self, z: Complex64, out: &mut [f64]) {
        let mut c = 0;
        for p in self.poles() {
            let q = (z - p).inv();
            out[c] = q.re;
            out[c + 1] = q.im;
            c += 2;
        }
        let zeta = (z - self.center) / self.radius;
        let mut pw = Complex64::new(1.0, 0.0);
        out[c] = 1.0;
        c += 1;
        for _ in 1..=self.poly_degree {
            pw *= zeta;
            out[c] = pw.re;
            out[c + 1] = pw.im;
            c += 2;
        }
    }

    fn matrix(&self, zs: &[Complex64]) -> Matrix {
        let mut a = Matrix::zeros(zs.len(), self.dof());
        let mut row = vec![0.0; self.dof()];
        for (i, &z) in zs.iter().enumerate() {
            self.row(z, &mut row);
            for (j, v) in row.iter().enumerate() {
                a.set(i, j, *v);
            }
        }
        a
    }

    /// `sum c_j b_j(z)`.
    pub fn value(&self, coeffs: &[f64], z: Complex64) -> f64 {
        let mut row = vec![0.0; self.dof()];
        self.row(z, &mut row);
        row.iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }
}

/// Places `n_per_corner` poles outside each corner along the exterior
/// bisector at distances `corner_scale * exp(-4 (sqrt n - sqrt k))`.
pub fn build_basis(domain: &PolygonDomain, n_per_corner: usize, poly_degree: usize) -> Result<LightningBasis> {
    let dist = if n_per_corner > 0 { lightning_poles(n_per_corner, LIGHTNING_SIGMA)?.distances() } else { vec![] };
    let mut corner_poles = Vec::with_capacity(domain.len());
    let mut bad = Vec::new();
    for c in 0..domain.len() {
        let (v, b, s) = (domain.vertices[c], domain.exterior_bisector(c), domain.corner_scale(c));
        let poles: Vec<Complex64> = dist.iter().map(|d| v + b * (s * d)).collect();
        if poles.iter().any(|&p| !domain.is_exterior(p)) {
            bad.push(c);
        }
        corner_poles.push(poles);
    }
    if !bad.is_empty() {
        return Err(Error::BasisConstruction { corners: bad });
    }
    Ok(LightningBasis { corner_poles, poly_degree, center: domain.center(), radius: domain.scale(), n_per_corner })
}

/// Default per-half-edge sample parameter: `max(3 n_per_corner, 20)`.
pub fn default_samples_per_edge(n_per_corner: usize) -> usize {
    (3 * n_per_corner).max(20)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LightningSolution {
    pub coeffs: Vec<f64>,
    /// Max `|u - g|` over the 2x finer validation sampling.
    pub boundary_residual: f64,
    /// Max `|u - g|` over the fitting samples.
    pub fit_residual: f64,
    pub dof: usize,
    pub rank: usize,
    pub samples: usize,
}

/// Relative pivot threshold below which basis directions are dropped.
pub const LIGHTNING_RCOND: f64 = 1e-14;

/// Weighted least-squares fit of `g` on the boundary.
pub fn solve<G>(domain: &PolygonDomain, basis: &LightningBasis, g: G, samples_per_edge: Option<usize>) -> Result<LightningSolution>
where
    G: Fn(Complex64) -> f64 + Sync,
{
    let mut m = samples_per_edge.unwrap_or_else(|| default_samples_per_edge(basis.n_per_corner));
    let (mut zs, mut ws) = domain.boundary_samples(m);
    if samples_per_edge.is_none() {
        while zs.len() < 3 * basis.dof() {
            m *= 2;
            (zs, ws) = domain.boundary_samples(m);
        }
    } else if zs.len() < 3 * basis.dof() {
        return Err(invalid(format!("{} boundary samples for {} unknowns; need at least 3x", zs.len(), basis.dof())));
    }
    let gv: Vec<f64> = zs.iter().map(|&z| g(z)).collect();
    if let Some(i) = gv.iter().position(|v| !v.is_finite()) {
        return Err(Error::ComplexEvaluation { z: zs[i] });
    }
    let mut a = basis.matrix(&zs);
    let sw: Vec<f64> = ws.iter().map(|w| w.sqrt()).collect();
    a.scale_rows(&sw);
    let b: Vec<f64> = gv.iter().zip(&sw).map(|(g, s)| g * s).collect();
    let sol = lstsq(&a, &b, LstsqOptions { rcond: LIGHTNING_RCOND, policy: RankPolicy::Truncate })?;
    if sol.rank < basis.poly_columns().min(basis.dof()) {
        return Err(Error::IllPosed { rank: sol.rank, cols: basis.dof() });
    }
    let coeffs = sol.coeffs;
    let fit_residual = zs.iter().zip(&gv).map(|(&z, g)| (basis.value(&coeffs, z) - g).abs()).fold(0.0, f64::max);
    let (zv, _) = domain.boundary_samples(2 * m);
    let boundary_residual = zv.par_iter().map(|&z| (basis.value(&coeffs, z) - g(z)).abs()).reduce(|| 0.0, f64::max);
    Ok(LightningSolution { coeffs, boundary_residual, fit_residual, dof: basis.dof(), rank: sol.rank, samples: zs.len() })
}

/// Solution value at an interior point.
pub fn evaluate_solution(domain: &PolygonDomain, basis: &LightningBasis, sol: &LightningSolution, z: Complex64) -> Result<f64> {
    if !domain.contains(z) {
        return Err(Error::Domain { z });
    }
    Ok(basis.value(&sol.coeffs, z))
}

/// One step of [`solve_adaptive`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStep {
    pub n_per_corner: usize,
    pub poly_degree: usize,
    pub dof: usize,
    pub residual: f64,
}

/// Result of [`solve_adaptive`]: the last basis tried and its solution.
#[derive(Debug, Clone)]
pub struct AdaptiveSolution {
    pub basis: LightningBasis,
    pub solution: LightningSolution,
    pub history: Vec<ConvergenceStep>,
    pub reached_target: bool,
}

/// Doubles the poles per corner from `start` (polynomial degree
/// `round(sqrt(total poles))`) until the residual reaches `target` or the
/// next basis would exceed `max_dof` unknowns.
pub fn solve_adaptive<G>(domain: &PolygonDomain, g: G, target: f64, start: usize, max_dof: usize) -> Result<AdaptiveSolution>
where
    G: Fn(Complex64) -> f64 + Sync,
{
    if start == 0 {
        return Err(invalid("adaptive solve needs a positive starting pole count"));
    }
    let mut n = start;
    let mut history = Vec::new();
    let mut last: Option<(LightningBasis, LightningSolution)> = None;
    loop {
        let degree = ((n * domain.len()) as f64).sqrt().round() as usize;
        let basis = build_basis(domain, n, degree)?;
        if basis.dof() > max_dof && last.is_some() {
            break;
        }
        let sol = solve(domain, &basis, &g, None)?;
        history.push(ConvergenceStep { n_per_corner: n, poly_degree: degree, dof: sol.dof, residual: sol.boundary_residual });
        let done = sol.boundary_residual <= target;
        last = Some((basis, sol));
        if done {
            break;
        }
        n *= 2;
    }
    let (basis, solution) = last.expect("at least one solve");
    let reached_target = solution.boundary_residual <= target;
    Ok(AdaptiveSolution { basis, solution, history, reached_target })
}
