//! Graded sample grids and discrete sup-norm error curves.
//!
//! Functions with a singularity at `x = 0` are sampled on exponentially graded
//! meshes (`10^t` for equispaced `t`). Sup-norms are measured on such meshes as a
//! proxy for the continuum norm.

use crate::error::{invalid, Error, Result};

/// Points below this magnitude do not count as a sign in an error curve.
pub const SIGN_DEAD_BAND: f64 = 1e-15;

/// Decades used by [`GradedGrid::fitting`] and [`GradedGrid::reporting`].
pub const FIT_DECADES: (f64, f64) = (-12.0, 0.0);

/// Sample count of the standard fitting mesh.
pub const FIT_COUNT: usize = 2000;

/// Sample count of the standard reporting mesh.
pub const REPORT_COUNT: usize = 100_000;

/// An increasing list of sample points, usually `10^t` for equispaced `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedGrid {
    points: Vec<f64>,
    decades: f64,
    count: usize,
}

impl GradedGrid {
    /// `count` points `10^t`, `t` equispaced in `[a_exp, b_exp]`.
    pub fn logspace(a_exp: f64, b_exp: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(invalid(format!("graded grid needs at least 2 points, got {count}")));
        }
        if !(a_exp < b_exp) || !a_exp.is_finite() || !b_exp.is_finite() {
            return Err(invalid(format!("graded grid needs finite a_exp < b_exp, got [{a_exp}, {b_exp}]")));
        }
        let step = (b_exp - a_exp) / (count - 1) as f64;
        let points = (0..count)
            .map(|i| {
                let t = if i + 1 == count { b_exp } else { a_exp + step * i as f64 };
                10f64.powf(t)
            })
            .collect();
        Ok(Self { points, decades: b_exp - a_exp, count })
    }

    /// The `logspace(-12, 0, 2000)` mesh used for least-squares fits on `[0, 1]`.
    pub fn fitting() -> Self {
        Self::logspace(FIT_DECADES.0, FIT_DECADES.1, FIT_COUNT).expect("static grid")
    }

    /// The 100 000 point mesh used to report sup errors, with `x = 0` prepended.
    pub fn reporting(a_exp: f64) -> Self {
        Self::logspace(a_exp, 0.0, REPORT_COUNT).expect("static grid").with_origin()
    }

    /// Wraps an arbitrary strictly increasing list of finite points.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("grid needs at least 2 points"));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(invalid("grid points must be finite"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("grid points must be strictly increasing"));
        }
        let (lo, hi) = (points[0], points[points.len() - 1]);
        let decades = if lo > 0.0 { (hi / lo).log10() } else { f64::INFINITY };
        let count = points.len();
        Ok(Self { points, decades, count })
    }

    /// Prepends `x = 0` if the grid is strictly positive.
    pub fn with_origin(mut self) -> Self {
        if self.points[0] > 0.0 {
            self.points.insert(0, 0.0);
            self.decades = f64::INFINITY;
            self.count += 1;
        }
        self
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn decades(&self) -> f64 {
        self.decades
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Builds the graded grid `10^t`, `t` equispaced in `[a_exp, b_exp]`.
pub fn build_graded_grid(a_exp: f64, b_exp: f64, count: usize) -> Result<GradedGrid> {
    GradedGrid::logspace(a_exp, b_exp, count)
}

/// A signed local extremum of an error curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub e: f64,
}

/// Sampled error `e(x)` with its sup-norm and alternating extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    samples: Vec<(f64, f64)>,
    norm_inf: f64,
    extrema: Vec<Extremum>,
}

impl ErrorCurve {
    /// Builds the curve from `(x, e)` samples ordered by `x`.
    ///
    /// The extrema are the largest-magnitude samples of each maximal run of
    /// constant sign, so consecutive extrema always alternate in sign. Samples
    /// with `|e| <= SIGN_DEAD_BAND` belong to no run.
    pub fn from_samples(samples: Vec<(f64, f64)>) -> Self {
        let norm_inf = samples.iter().fold(0.0_f64, |m, &(_, e)| m.max(e.abs()));
        let mut extrema: Vec<Extremum> = Vec::new();
        for &(x, e) in &samples {
            if e.abs() <= SIGN_DEAD_BAND {
                continue;
            }
            match extrema.last_mut() {
                Some(last) if last.e.signum() == e.signum() => {
                    if e.abs() > last.e.abs() {
                        *last = Extremum { x, e };
                    }
                }
                _ => extrema.push(Extremum { x, e }),
            }
        }
        Self { samples, norm_inf, extrema }
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn norm_inf(&self) -> f64 {
        self.norm_inf
    }

    pub fn extrema(&self) -> &[Extremum] {
        &self.extrema
    }

    /// Ratio of the largest to the smallest alternating extremum magnitude.
    pub fn extrema_ratio(&self) -> f64 {
        let (lo, hi) = self.extrema.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), ex| (lo.min(ex.e.abs()), hi.max(ex.e.abs())));
        if self.extrema.is_empty() {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// The same curve with every sample negated.
    pub fn negated(&self) -> Self {
        Self::from_samples(self.samples.iter().map(|&(x, e)| (x, -e)).collect())
    }
}

/// Samples `f - r` on `grid`.
pub fn sup_error<F, R>(f: F, r: R, grid: &GradedGrid) -> Result<ErrorCurve>
where
    F: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    let mut samples = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        let (fx, rx) = (f(x), r(x));
        if !fx.is_finite() || !rx.is_finite() {
            return Err(Error::Evaluation { x });
        }
        samples.push((x, fx - rx));
    }
    Ok(ErrorCurve::from_samples(samples))
}

/// Like [`sup_error`] for a fallible approximant.
pub fn sup_error_with<F, R>(f: F, r: R, grid: &GradedGrid) -> Result<ErrorCurve>
where
    F: Fn(f64) -> f64,
    R: Fn(f64) -> Result<f64>,
{
    let mut samples = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        let (fx, rx) = (f(x), r(x)?);
        if !fx.is_finite() || !rx.is_finite() {
            return Err(Error::Evaluation { x });
        }
        samples.push((x, fx - rx));
    }
    Ok(ErrorCurve::from_samples(samples))
}
