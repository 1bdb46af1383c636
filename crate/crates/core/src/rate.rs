//! Convergence-rate fits of `log(error)` against `sqrt(n)` or `n`.

use crate::error::{invalid, Result};

/// Horizontal axis of a rate fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateAxis {
    /// `log e` against `sqrt(n)`: straight for root-exponential convergence.
    SqrtN,
    /// `log e` against `n`: straight for exponential convergence.
    N,
}

impl RateAxis {
    pub fn coordinate(self, n: f64) -> f64 {
        match self {
            RateAxis::SqrtN => n.sqrt(),
            RateAxis::N => n,
        }
    }
}

/// Least-squares line through `(axis(n), ln e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub axis: RateAxis,
}

impl RateFit {
    /// `slope^2`, the constant `C` in `exp(-sqrt(C n))` for a `sqrt(n)` fit.
    pub fn slope_squared(&self) -> f64 {
        self.slope * self.slope
    }

    pub fn predict(&self, n: f64) -> f64 {
        (self.intercept + self.slope * self.axis.coordinate(n)).exp()
    }
}

/// Ordinary least-squares line `y = slope x + intercept` and its `r^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(invalid("linear fit: x and y lengths differ"));
    }
    if xs.len() < 2 {
        return Err(invalid("linear fit needs at least 2 points"));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(invalid("linear fit: all abscissae coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(LineFit { slope, intercept, r2 })
}

/// Fits `ln e` against `sqrt(n)` or `n` over all supplied points.
pub fn fit_rate(errors: &[(usize, f64)], axis: RateAxis) -> Result<RateFit> {
    if errors.len() < 3 {
        return Err(invalid(format!("rate fit needs at least 3 points, got {}", errors.len())));
    }
    if let Some(&(n, e)) = errors.iter().find(|(_, e)| !(*e > 0.0) || !e.is_finite()) {
        return Err(invalid(format!("rate fit needs positive finite errors, got e = {e} at n = {n}")));
    }
    let xs: Vec<f64> = errors.iter().map(|&(n, _)| axis.coordinate(n as f64)).collect();
    let ys: Vec<f64> = errors.iter().map(|&(_, e)| e.ln()).collect();
    let line = linear_fit(&xs, &ys)?;
    Ok(RateFit { slope: line.slope, intercept: line.intercept, r2: line.r2, axis })
}

/// Preasymptotic degrees below this are dropped by [`fit_rate_from`] callers by default.
pub const DEFAULT_MIN_N: usize = 4;

/// [`fit_rate`] restricted to `n >= min_n`.
pub fn fit_rate_from(errors: &[(usize, f64)], axis: RateAxis, min_n: usize) -> Result<RateFit> {
    let kept: Vec<(usize, f64)> = errors.iter().copied().filter(|&(n, _)| n >= min_n).collect();
    fit_rate(&kept, axis)
}
