//! Least-squares and Lawson (linear minimax) fits with preassigned poles.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::approximants::{PoleResidue, RationalApproximant};
use crate::clustering::{tapered_poles, uniform_poles, ClusterKind, ClusteredPoleSet};
use crate::error::{invalid, Error, Result};
use crate::grid::{ErrorCurve, GradedGrid};
use crate::linalg::{lstsq, norm2, LstsqOptions, Matrix, RankPolicy};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nonnegative weight function on the fitting interval.
#[derive(Clone)]
pub enum Weight {
    /// `w(x) = sqrt(x)`.
    Sqrt,
    Uniform,
    Custom(ScalarFn),
}

impl Weight {
    pub fn at(&self, x: f64) -> f64 {
        match self {
            Weight::Sqrt => x.sqrt(),
            Weight::Uniform => 1.0,
            Weight::Custom(w) => w(x),
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Sqrt => write!(f, "Sqrt"),
            Weight::Uniform => write!(f, "Uniform"),
            Weight::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Fit of `f` by `sum_{j<=d} c_j x^j + sum_k a_k / (x - p_k)` on a grid.
///
/// `weight` scales the rows of the least-squares problem, so a least-squares
/// fit minimizes `sum w(x_i)^2 (f - r)^2`. `error_weight` multiplies the
/// error in the reported curve and is what Lawson iteration equalizes.
#[derive(Clone)]
pub struct FitProblem {
    f: ScalarFn,
    poles: ClusteredPoleSet,
    grid: GradedGrid,
    weight: Weight,
    error_weight: Weight,
    poly_degree: usize,
    lstsq: LstsqOptions,
}

impl fmt::Debug for FitProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FitProblem")
            .field("poles", &self.poles)
            .field("grid_len", &self.grid.len())
            .field("weight", &self.weight)
            .field("error_weight", &self.error_weight)
            .field("poly_degree", &self.poly_degree)
            .finish()
    }
}

impl FitProblem {
    pub fn new<F>(f: F, poles: ClusteredPoleSet, grid: GradedGrid) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Some(&x) = grid.points().iter().find(|x| poles.poles().contains(x)) {
            return Err(invalid(format!("grid point {x} coincides with a pole")));
        }
        let m = grid.len();
        Ok(Self {
            f: Arc::new(f),
            poles,
            grid,
            weight: Weight::Sqrt,
            error_weight: Weight::Uniform,
            poly_degree: 0,
            lstsq: LstsqOptions { rcond: f64::EPSILON * m as f64, policy: RankPolicy::Strict },
        })
    }

    pub fn with_weight(mut self, w: Weight) -> Self {
        self.weight = w;
        self
    }

    pub fn with_error_weight(mut self, w: Weight) -> Self {
        self.error_weight = w;
        self
    }

    pub fn with_poly_degree(mut self, d: usize) -> Self {
        self.poly_degree = d;
        self
    }

    pub fn with_lstsq_options(mut self, opts: LstsqOptions) -> Self {
        self.lstsq = opts;
        self
    }

    pub fn poles(&self) -> &ClusteredPoleSet {
        &self.poles
    }

    pub fn grid(&self) -> &GradedGrid {
        &self.grid
    }

    pub fn poly_degree(&self) -> usize {
        self.poly_degree
    }

    /// Number of coefficients, `poly_degree + 1 + #poles`.
    pub fn basis_len(&self) -> usize {
        self.poly_degree + 1 + self.poles.len()
    }

    pub fn target(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn basis_matrix(&self) -> Matrix {
        let pts = self.grid.points();
        let mut a = Matrix::zeros(pts.len(), self.basis_len());
        for (i, &x) in pts.iter().enumerate() {
            let mut xj = 1.0;
            for j in 0..=self.poly_degree {
                a.set(i, j, xj);
                xj *= x;
            }
            for (k, &p) in self.poles.poles().iter().enumerate() {
                a.set(i, self.poly_degree + 1 + k, 1.0 / (x - p));
            }
        }
        a
    }

    fn targets(&self) -> Result<Vec<f64>> {
        self.grid
            .points()
            .iter()
            .map(|&x| {
                let v = (self.f)(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Evaluation { x })
                }
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        if self.grid.len() < self.basis_len() {
            return Err(invalid(format!("grid has {} points but the basis has {} functions", self.grid.len(), self.basis_len())));
        }
        Ok(())
    }

    /// `sqrt(sum w(x_i)^2 (f(x_i) - r(x_i))^2)` for the given coefficients.
    pub fn weighted_residual_norm(&self, coeffs: &[f64]) -> Result<f64> {
        let a = self.basis_matrix();
        let y = self.targets()?;
        let r = a.mul_vec(coeffs);
        let res: Vec<f64> = self.grid.points().iter().zip(y.iter().zip(&r)).map(|(&x, (fy, ry))| self.weight.at(x) * (fy - ry)).collect();
        Ok(norm2(&res))
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub approximant: RationalApproximant,
    /// Polynomial coefficients (ascending) followed by one residue per pole.
    pub coeffs: Vec<f64>,
    /// `error_weight * (f - r)` on the problem grid.
    pub error_curve: ErrorCurve,
    pub lawson_iterations: usize,
    pub equioscillation_count: usize,
    pub converged: bool,
}

impl FitResult {
    /// Zeros of the error curve, located by linear interpolation between
    /// consecutive samples of opposite sign.
    pub fn interpolation_points(&self) -> Vec<f64> {
        let s = self.error_curve.samples();
        let mut out = Vec::new();
        let mut last: Option<(f64, f64)> = None;
        for &(x, e) in s {
            if e.abs() <= crate::grid::SIGN_DEAD_BAND {
                continue;
            }
            if let Some((x0, e0)) = last {
                if e0.signum() != e.signum() {
                    out.push(x0 + (x - x0) * e0 / (e0 - e));
                }
            }
            last = Some((x, e));
        }
        out
    }

    /// Sup norm of `f - r` (unweighted) on another grid.
    pub fn sup_error_on<F: Fn(f64) -> f64>(&self, f: F, grid: &GradedGrid) -> Result<f64> {
        crate::grid::sup_error_with(f, |x| self.approximant.eval(x), grid).map(|c| c.norm_inf())
    }
}

/// Number of alternating-sign extrema of the curve.
pub fn equioscillation_count(curve: &ErrorCurve) -> usize {
    if curve.samples().len() < 3 {
        return 0;
    }
    curve.extrema().len()
}

struct Solver<'a> {
    problem: &'a FitProblem,
    basis: Matrix,
    y: Vec<f64>,
    ew: Vec<f64>,
}

impl<'a> Solver<'a> {
    fn new(problem: &'a FitProblem) -> Result<Self> {
        problem.check()?;
        let y = problem.targets()?;
        let ew = problem.grid.points().iter().map(|&x| problem.error_weight.at(x)).collect();
        Ok(Self { problem, basis: problem.basis_matrix(), y, ew })
    }

    fn solve(&self, row_scale: &[f64]) -> Result<Vec<f64>> {
        let mut a = self.basis.clone();
        a.scale_rows(row_scale);
        let b: Vec<f64> = self.y.iter().zip(row_scale).map(|(y, s)| y * s).collect();
        Ok(lstsq(&a, &b, self.problem.lstsq)?.coeffs)
    }

    fn curve(&self, coeffs: &[f64]) -> ErrorCurve {
        let r = self.basis.mul_vec(coeffs);
        let samples =
            self.problem.grid.points().iter().zip(self.y.iter().zip(&r)).zip(&self.ew).map(|((&x, (fy, ry)), w)| (x, w * (fy - ry))).collect();
        ErrorCurve::from_samples(samples)
    }

    fn result(&self, coeffs: Vec<f64>, curve: ErrorCurve, iterations: usize, converged: bool) -> FitResult {
        let d = self.problem.poly_degree;
        let approximant = RationalApproximant::PoleResidue(PoleResidue::new(
            self.problem.poles.poles().iter().map(|&p| Complex64::new(p, 0.0)).collect(),
            coeffs[d + 1..].iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            coeffs[..=d].to_vec(),
        ));
        let count = equioscillation_count(&curve);
        FitResult { approximant, coeffs, error_curve: curve, lawson_iterations: iterations, equioscillation_count: count, converged }
    }
}

/// Weighted least-squares fit.
pub fn least_squares_fit(p: &FitProblem) -> Result<FitResult> {
    let s = Solver::new(p)?;
    let scale: Vec<f64> = p.grid.points().iter().map(|&x| p.weight.at(x)).collect();
    let c = s.solve(&scale)?;
    let curve = s.curve(&c);
    Ok(s.result(c, curve, 0, true))
}

/// Default Lawson stopping tolerance on the extrema ratio.
pub const LAWSON_TOL: f64 = 0.05;
/// Default Lawson iteration cap.
pub const LAWSON_MAX_ITER: usize = 100;

/// Lawson iteration: least squares with weights updated as `l_i <- l_i |e_i|`.
///
/// Starts from the least-squares weights `w(x_i)^2`. Stops once the error has
/// at least `basis_len + 1` alternating extrema whose magnitudes agree to
/// within a factor `1 + tol`. The iterate with the smallest sup error is
/// returned, with `converged = false` if the stopping test never passed.
pub fn lawson_minimax_fit(p: &FitProblem, max_iter: usize, tol: f64) -> Result<FitResult> {
    if max_iter == 0 {
        return Err(invalid("Lawson iteration needs max_iter >= 1"));
    }
    if !(tol >= 0.0) {
        return Err(invalid(format!("tolerance must be nonnegative, got {tol}")));
    }
    let s = Solver::new(p)?;
    let mut lam: Vec<f64> = p.grid.points().iter().map(|&x| p.weight.at(x).powi(2)).collect();
    normalize_max(&mut lam)?;
    let needed = p.basis_len() + 1;
    let mut best: Option<(Vec<f64>, ErrorCurve, usize)> = None;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let scale: Vec<f64> = lam.iter().map(|l| l.sqrt()).collect();
        let c = s.solve(&scale)?;
        let curve = s.curve(&c);
        let done = curve.extrema().len() >= needed && curve.extrema_ratio() <= 1.0 + tol;
        if best.as_ref().is_none_or(|(_, b, _)| curve.norm_inf() < b.norm_inf()) {
            best = Some((c, curve.clone(), iterations));
        }
        if done {
            converged = true;
            break;
        }
        for (l, &(_, e)) in lam.iter_mut().zip(curve.samples()) {
            *l *= e.abs();
        }
        if normalize_max(&mut lam).is_err() {
            break;
        }
    }
    let (c, curve, _) = best.expect("at least one iteration");
    Ok(s.result(c, curve, iterations, converged))
}

fn normalize_max(v: &mut [f64]) -> Result<()> {
    let m = v.iter().fold(0.0_f64, |a, b| a.max(*b));
    if !(m > 0.0) || !m.is_finite() {
        return Err(invalid("weights vanish on the whole grid"));
    }
    for x in v {
        *x /= m;
    }
    Ok(())
}

/// Evaluates `f(n)` for every `n` in parallel, keeping the input order.
pub fn sweep<T, F>(ns: &[usize], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    ns.par_iter().map(|&n| f(n)).collect()
}

/// Lower decade of the linear-minimax experiment's fitting and reporting grids.
pub const MINIMAX_DECADE: f64 = -15.0;

/// Pole sets of the uniform/tapered linear-minimax comparison:
/// `-exp(-pi k / sqrt n)`, `k < n`, and `-exp(sqrt 2 pi (sqrt k - sqrt n))`, `1 <= k <= n`.
pub fn comparison_poles(kind: ClusterKind, n: usize) -> Result<ClusteredPoleSet> {
    let nf = n as f64;
    match kind {
        ClusterKind::Uniform => uniform_poles(n, std::f64::consts::PI / nf.sqrt()),
        ClusterKind::Tapered => tapered_poles(n, std::f64::consts::SQRT_2 * std::f64::consts::PI),
        other => Err(invalid(format!("no comparison pole set for {other:?}"))),
    }
}

/// One point of the uniform/tapered comparison.
#[derive(Debug, Clone)]
pub struct MinimaxPoint {
    pub n: usize,
    pub fit: FitResult,
    /// Sup error on the 1e5-point reporting grid.
    pub reported_error: f64,
}

/// Lawson fit of `sqrt(x)` on `logspace(-15, 0, 2000)` with the comparison poles.
pub fn sqrt_minimax(kind: ClusterKind, n: usize) -> Result<MinimaxPoint> {
    let poles = comparison_poles(kind, n)?;
    let grid = GradedGrid::logspace(MINIMAX_DECADE, 0.0, crate::grid::FIT_COUNT)?;
    let problem = FitProblem::new(f64::sqrt, poles, grid)?;
    let fit = lawson_minimax_fit(&problem, LAWSON_MAX_ITER, LAWSON_TOL)?;
    let reported_error = fit.sup_error_on(f64::sqrt, &GradedGrid::reporting(MINIMAX_DECADE))?;
    Ok(MinimaxPoint { n, fit, reported_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::ClusteredPoleSet;
    use proptest::prelude::*;
    use std::f64::consts::{PI, SQRT_2};

    fn fitting_grid() -> GradedGrid {
        GradedGrid::fitting()
    }

    #[test]
    fn representable_target_is_reproduced() {
        let poles = ClusteredPoleSet::custom(vec![-0.5, -0.1, -2.0]).unwrap();
        let p = FitProblem::new(|x| 1.0 / (x + 0.5), poles, fitting_grid()).unwrap();
        let fit = least_squares_fit(&p).unwrap();
        assert!(fit.error_curve.norm_inf() <= 1e-12, "{}", fit.error_curve.norm_inf());
    }

    #[test]
    fn grid_smaller_than_basis_is_rejected() {
        let poles = uniform_poles(5, 1.0).unwrap();
        let g = GradedGrid::logspace(-1.0, 0.0, 4).unwrap();
        let p = FitProblem::new(f64::sqrt, poles, g).unwrap();
        assert!(matches!(least_squares_fit(&p), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn duplicate_basis_is_ill_posed() {
        let g = GradedGrid::logspace(-1.0, 0.0, 50).unwrap();
        let p = FitProblem::new(f64::sqrt, ClusteredPoleSet::empty(), g).unwrap().with_poly_degree(1);
        // x^0 and x^1 are independent, so this is fine; degree 60 on 50 points is not.
        assert!(least_squares_fit(&p).is_ok());
        let g = GradedGrid::logspace(-1.0, 0.0, 50).unwrap();
        let p = FitProblem::new(f64::sqrt, ClusteredPoleSet::empty(), g).unwrap().with_poly_degree(30);
        assert!(matches!(least_squares_fit(&p), Err(Error::IllPosed { .. })));
    }

    #[test]
    fn residual_is_orthogonal_to_weighted_columns() {
        let n = 12;
        let p = FitProblem::new(f64::sqrt, uniform_poles(n, PI / (n as f64).sqrt()).unwrap(), fitting_grid()).unwrap();
        let fit = least_squares_fit(&p).unwrap();
        let a = p.basis_matrix();
        let w: Vec<f64> = p.grid.points().iter().map(|x| x.sqrt()).collect();
        let res: Vec<f64> = fit.error_curve.samples().iter().zip(&w).map(|(&(_, e), w)| w * e).collect();
        for j in 0..a.cols() {
            let col: Vec<f64> = a.col(j).iter().zip(&w).map(|(c, w)| c * w).collect();
            let dot: f64 = col.iter().zip(&res).map(|(c, r)| c * r).sum();
            assert!(dot.abs() <= 1e-8 * norm2(&col) * norm2(&res).max(1e-300), "column {j}");
        }
    }

    #[test]
    fn sqrt_weighted_fit_matches_independent_solver() {
        // numpy.linalg.lstsq on the same rows gives max |f - r| = 0.012607129832940935 on the grid.
        let n = 16;
        let p = FitProblem::new(f64::sqrt, uniform_poles(n, PI / (n as f64).sqrt()).unwrap(), fitting_grid()).unwrap();
        let e = least_squares_fit(&p).unwrap().error_curve.norm_inf();
        assert!((e - 0.012607129832940935).abs() <= 1e-6 * e, "{e}");
    }

    #[test]
    fn perturbing_least_squares_coefficients_never_helps() {
        let n = 10;
        let p = FitProblem::new(f64::sqrt, tapered_poles(n, SQRT_2 * PI).unwrap(), fitting_grid()).unwrap();
        let fit = least_squares_fit(&p).unwrap();
        let base = p.weighted_residual_norm(&fit.coeffs).unwrap();
        for j in 0..fit.coeffs.len() {
            for sgn in [-1.0, 1.0] {
                let mut c = fit.coeffs.clone();
                c[j] *= 1.0 + sgn * 1e-6;
                assert!(p.weighted_residual_norm(&c).unwrap() >= base * (1.0 - 1e-15));
            }
        }
    }

    #[test]
    fn constant_minimax_of_sqrt() {
        let g = GradedGrid::logspace(-12.0, 0.0, 500).unwrap().with_origin();
        let p = FitProblem::new(f64::sqrt, ClusteredPoleSet::empty(), g).unwrap().with_weight(Weight::Uniform);
        let fit = lawson_minimax_fit(&p, 2000, 1e-6).unwrap();
        assert!((fit.coeffs[0] - 0.5).abs() < 1e-5, "{}", fit.coeffs[0]);
        assert!((fit.error_curve.norm_inf() - 0.5).abs() < 1e-5);
        assert_eq!(fit.equioscillation_count, 2);
    }

    #[test]
    fn lawson_equioscillates_at_ten() {
        let pt = sqrt_minimax(ClusterKind::Uniform, 10).unwrap();
        assert!(pt.fit.converged);
        assert_eq!(pt.fit.equioscillation_count, 12);
        let z = pt.fit.interpolation_points();
        assert_eq!(z.len(), 11);
    }

    #[test]
    fn lawson_never_worse_than_least_squares() {
        for kind in [ClusterKind::Uniform, ClusterKind::Tapered] {
            for n in [4, 12, 20] {
                let poles = comparison_poles(kind, n).unwrap();
                let p = FitProblem::new(f64::sqrt, poles, fitting_grid()).unwrap();
                let ls = least_squares_fit(&p).unwrap();
                let lw = lawson_minimax_fit(&p, LAWSON_MAX_ITER, LAWSON_TOL).unwrap();
                assert!(lw.error_curve.norm_inf() <= ls.error_curve.norm_inf() + 1e-12);
            }
        }
    }

    #[test]
    fn tapered_least_squares_beats_uniform() {
        let n = 30;
        let grid = GradedGrid::logspace(MINIMAX_DECADE, 0.0, 2000).unwrap();
        let report = GradedGrid::reporting(MINIMAX_DECADE);
        let err = |kind| {
            let p = FitProblem::new(f64::sqrt, comparison_poles(kind, n).unwrap(), grid.clone()).unwrap();
            least_squares_fit(&p).unwrap().sup_error_on(f64::sqrt, &report).unwrap()
        };
        assert!(err(ClusterKind::Tapered) < err(ClusterKind::Uniform));
    }

    #[test]
    fn weighted_error_is_stored() {
        let p = FitProblem::new(|x: f64| x.powf(1.0 / PI), uniform_poles(6, 1.0).unwrap(), fitting_grid())
            .unwrap()
            .with_error_weight(Weight::Custom(Arc::new(|x: f64| x)));
        let fit = least_squares_fit(&p).unwrap();
        for &(x, e) in fit.error_curve.samples() {
            let r = fit.approximant.eval(x).unwrap();
            assert!((e - x * (x.powf(1.0 / PI) - r)).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_curve_has_at_most_two_extrema() {
        let c = ErrorCurve::from_samples((0..50).map(|i| (i as f64, i as f64 - 10.0)).collect());
        assert!(equioscillation_count(&c) <= 2);
    }

    #[test]
    fn sweep_keeps_order() {
        let out = sweep(&[5, 1, 3], |n| Ok(n * 2)).unwrap();
        assert_eq!(out, vec![10, 2, 6]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn lawson_dominates_least_squares_for_random_tapers(n in 2usize..16, sigma in 2.0f64..6.0) {
            let p = FitProblem::new(f64::sqrt, tapered_poles(n, sigma).unwrap(), fitting_grid()).unwrap();
            let ls = least_squares_fit(&p).unwrap();
            let lw = lawson_minimax_fit(&p, 40, LAWSON_TOL).unwrap();
            prop_assert!(lw.error_curve.norm_inf() <= ls.error_curve.norm_inf() + 1e-12);
        }
    }
}
