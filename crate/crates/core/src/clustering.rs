//! Exponentially clustered pole sets on the negative real axis.
//!
//! Uniform sets have `log d_k` equispaced in `k`; tapered sets have `log d_k`
//! linear in `sqrt(k)`, so the density of poles on a log scale falls linearly
//! to zero at the singularity.

use crate::error::{invalid, Result};
use crate::linalg::{lstsq, LstsqOptions, Matrix};
use crate::rate::linear_fit;

/// Default tapering constant for lightning-solver pole preassignment.
pub const LIGHTNING_SIGMA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterKind {
    Uniform,
    Tapered,
    Lightning,
    Custom,
}

/// Generator parameters. For uniform sets `sigma` holds the log-spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    pub n: usize,
    pub sigma: f64,
    /// Overall distance scale; `1` unless set with [`ClusteredPoleSet::scaled`].
    pub beta: f64,
}

/// Negative real poles ordered by increasing distance `d_k = |p_k|` from the origin.
///
/// Index conventions follow the generating formulas: uniform sets use
/// `k = 0..n-1` (largest `k` closest), tapered and lightning sets use
/// `k = 1..n` (`k = 1` closest).
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredPoleSet {
    poles: Vec<f64>,
    kind: ClusterKind,
    params: ClusterParams,
}

impl ClusteredPoleSet {
    /// Wraps arbitrary negative poles; they are sorted by distance.
    pub fn custom(mut poles: Vec<f64>) -> Result<Self> {
        if poles.iter().any(|p| !(*p < 0.0) || !p.is_finite()) {
            return Err(invalid("custom poles must be finite and negative"));
        }
        poles.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if poles.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("custom poles must be distinct"));
        }
        let n = poles.len();
        Ok(Self { poles, kind: ClusterKind::Custom, params: ClusterParams { n, sigma: f64::NAN, beta: 1.0 } })
    }

    /// Empty pole set, for pure polynomial fits.
    pub fn empty() -> Self {
        Self { poles: vec![], kind: ClusterKind::Custom, params: ClusterParams { n: 0, sigma: f64::NAN, beta: 1.0 } }
    }

    /// Multiplies every distance by `beta`.
    pub fn scaled(mut self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(invalid(format!("scale must be positive, got {beta}")));
        }
        for p in &mut self.poles {
            *p *= beta;
        }
        self.params.beta *= beta;
        Ok(self)
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn distances(&self) -> Vec<f64> {
        self.poles.iter().map(|p| -p).collect()
    }

    pub fn kind(&self) -> ClusterKind {
        self.kind
    }

    pub fn params(&self) -> ClusterParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Distance of the pole closest to the origin.
    pub fn closest(&self) -> Option<f64> {
        self.poles.first().map(|p| -p)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("pole count n must be at least 1"));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// `p_k = -exp(-k h)`, `k = 0..n-1`.
pub fn uniform_poles(n: usize, h: f64) -> Result<ClusteredPoleSet> {
    check_n(n)?;
    check_positive("h", h)?;
    if (-((n - 1) as f64) * h).exp() == 0.0 {
        return Err(invalid(format!("closest pole underflows for n = {n}, h = {h}")));
    }
    let poles = (0..n).rev().map(|k| -(-(k as f64) * h).exp()).collect();
    Ok(ClusteredPoleSet { poles, kind: ClusterKind::Uniform, params: ClusterParams { n, sigma: h, beta: 1.0 } })
}

/// `p_k = -exp(sigma (sqrt(k) - sqrt(n)))`, `k = 1..n`.
pub fn tapered_poles(n: usize, sigma: f64) -> Result<ClusteredPoleSet> {
    check_n(n)?;
    check_positive("sigma", sigma)?;
    let sn = (n as f64).sqrt();
    let poles = (1..=n).map(|k| -(sigma * ((k as f64).sqrt() - sn)).exp()).collect();
    Ok(ClusteredPoleSet { poles, kind: ClusterKind::Tapered, params: ClusterParams { n, sigma, beta: 1.0 } })
}

/// Lightning preassignment distances `exp(-sigma (sqrt(n) - sqrt(k)))`, `k = 1..n`,
/// relative to a unit corner scale.
pub fn lightning_poles(n: usize, sigma: f64) -> Result<ClusteredPoleSet> {
    let mut set = tapered_poles(n, sigma)?;
    set.kind = ClusterKind::Lightning;
    Ok(set)
}

/// Straightness of `log d_k` against `sqrt(k)` and against `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaperDiagnostic {
    pub slope_sqrtk: f64,
    pub intercept_sqrtk: f64,
    pub r2_sqrtk: f64,
    pub slope_k: f64,
    pub r2_k: f64,
}

/// Fits `log d_k` against `sqrt(k)` and `k`, `k = 1..len`.
pub fn analyze_taper(distances: &[f64]) -> Result<TaperDiagnostic> {
    if distances.len() < 2 {
        return Err(invalid("taper analysis needs at least 2 distances"));
    }
    if let Some(d) = distances.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
        return Err(invalid(format!("distances must be positive, got {d}")));
    }
    if distances.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("distances must be strictly increasing"));
    }
    let ks: Vec<f64> = (1..=distances.len()).map(|k| k as f64).collect();
    let sqrt_ks: Vec<f64> = ks.iter().map(|k| k.sqrt()).collect();
    let logs: Vec<f64> = distances.iter().map(|d| d.ln()).collect();
    let a = linear_fit(&sqrt_ks, &logs)?;
    let b = linear_fit(&ks, &logs)?;
    Ok(TaperDiagnostic { slope_sqrtk: a.slope, intercept_sqrtk: a.intercept, r2_sqrtk: a.r2, slope_k: b.slope, r2_k: b.r2 })
}

/// Number of distances `<= e^s`.
pub fn cumulative_count(distances: &[f64], s: f64) -> usize {
    let t = s.exp();
    distances.iter().filter(|d| **d <= t).count()
}

/// Least-squares quadratic `c0 + c1 t + c2 t^2` through `(t, y)`, with its `r^2`.
pub fn quadratic_fit(ts: &[f64], ys: &[f64]) -> Result<([f64; 3], f64)> {
    if ts.len() != ys.len() || ts.len() < 3 {
        return Err(invalid("quadratic fit needs at least 3 matching points"));
    }
    let mut a = Matrix::zeros(ts.len(), 3);
    for (i, t) in ts.iter().enumerate() {
        a.set(i, 0, 1.0);
        a.set(i, 1, *t);
        a.set(i, 2, t * t);
    }
    let sol = lstsq(&a, ys, LstsqOptions::default())?;
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { (1.0 - sol.residual_norm.powi(2) / ss_tot).clamp(0.0, 1.0) };
    Ok(([sol.coeffs[0], sol.coeffs[1], sol.coeffs[2]], r2))
}
