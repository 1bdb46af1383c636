//! Node/pole product diagnostics and the strip model of tapered clustering.
//!
//! `phi(z) = prod (z - x_k) / prod (z - p_k)` for interpolation points `x_k`
//! and poles `p_k`. Everything is evaluated through sums of logarithms, since
//! the products themselves over- and underflow for a few dozen points.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::clustering::ClusterKind;
use crate::error::{invalid, Error, Result};
use crate::gauss::adaptive;

#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    interp_points: Vec<Complex64>,
    poles: Vec<Complex64>,
}

impl PointConfiguration {
    /// Points must be distinct within each list and the lists may differ in
    /// length by at most one.
    pub fn new(interp_points: Vec<Complex64>, poles: Vec<Complex64>) -> Result<Self> {
        if interp_points.len().abs_diff(poles.len()) > 1 {
            return Err(invalid(format!("{} interpolation points and {} poles differ by more than one", interp_points.len(), poles.len())));
        }
        for (name, pts) in [("interpolation points", &interp_points), ("poles", &poles)] {
            if pts.iter().any(|z| !z.is_finite()) {
                return Err(invalid(format!("{name} must be finite")));
            }
            for i in 0..pts.len() {
                if pts[i + 1..].contains(&pts[i]) {
                    return Err(invalid(format!("{name} must be distinct")));
                }
            }
        }
        Ok(Self { interp_points, poles })
    }

    /// Real interpolation points and poles.
    pub fn real(interp_points: &[f64], poles: &[f64]) -> Result<Self> {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(c(interp_points), c(poles))
    }

    pub fn interp_points(&self) -> &[Complex64] {
        &self.interp_points
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// Normalization used by [`discrete_potential`]: the pole count, at least 1.
    pub fn degree(&self) -> usize {
        self.poles.len().max(1)
    }
}

fn check_pole_collision(cfg: &PointConfiguration, z: Complex64) -> Result<()> {
    if let Some(index) = cfg.poles.iter().position(|&p| p == z) {
        return Err(Error::PoleEvaluation { index, pole: z });
    }
    Ok(())
}

/// `log |phi(z)|`; `-inf` at an interpolation point.
pub fn log_abs_phi(cfg: &PointConfiguration, z: Complex64) -> Result<f64> {
    check_pole_collision(cfg, z)?;
    let num: f64 = cfg.interp_points.iter().map(|x| (z - x).norm().ln()).sum();
    let den: f64 = cfg.poles.iter().map(|p| (z - p).norm().ln()).sum();
    Ok(num - den)
}

/// `log phi(z)`, with the argument reduced to `(-pi, pi]`.
pub fn log_phi(cfg: &PointConfiguration, z: Complex64) -> Result<Complex64> {
    check_pole_collision(cfg, z)?;
    let mut re = 0.0;
    let mut arg = 0.0;
    for x in &cfg.interp_points {
        let d = z - x;
        re += d.norm().ln();
        arg += d.arg();
    }
    for p in &cfg.poles {
        let d = z - p;
        re -= d.norm().ln();
        arg -= d.arg();
    }
    let arg = arg - 2.0 * PI * ((arg + PI) / (2.0 * PI)).floor();
    let arg = if arg <= -PI { arg + 2.0 * PI } else { arg };
    Ok(Complex64::new(re, arg))
}

pub fn phi(cfg: &PointConfiguration, z: Complex64) -> Result<Complex64> {
    let l = log_phi(cfg, z)?;
    if l.re == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(Complex64::from_polar(l.re.exp(), l.im))
}

/// `max_E |phi| / min_Gamma |phi|` with its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEstimate {
    pub tau: f64,
    pub log_tau: f64,
    pub log_max_e: f64,
    pub log_min_gamma: f64,
    /// `tau >= 1`: the sup-norm bound says nothing.
    pub vacuous: bool,
}

pub fn tau(cfg: &PointConfiguration, e_samples: &[Complex64], gamma_samples: &[Complex64]) -> Result<TauEstimate> {
    if e_samples.is_empty() || gamma_samples.is_empty() {
        return Err(invalid("tau needs nonempty sample sets"));
    }
    let mut log_max_e = f64::NEG_INFINITY;
    for &z in e_samples {
        log_max_e = log_max_e.max(log_abs_phi(cfg, z)?);
    }
    let mut log_min_gamma = f64::INFINITY;
    for &z in gamma_samples {
        log_min_gamma = log_min_gamma.min(log_abs_phi(cfg, z)?);
    }
    let log_tau = log_max_e - log_min_gamma;
    Ok(TauEstimate { tau: log_tau.exp(), log_tau, log_max_e, log_min_gamma, vacuous: log_tau >= 0.0 })
}

/// Median of `|phi|` over a sample set, a reference level for unnormalized curves.
pub fn median_abs_phi(cfg: &PointConfiguration, samples: &[Complex64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("median needs samples"));
    }
    let mut v = samples.iter().map(|&z| log_abs_phi(cfg, z)).collect::<Result<Vec<f64>>>()?;
    v.sort_by(|a, b| a.total_cmp(b));
    Ok(v[v.len() / 2].exp())
}

/// `u(z) = (sum log|z - x_k| - sum log|z - p_k|) / n`, `n` = [`PointConfiguration::degree`].
pub fn discrete_potential(cfg: &PointConfiguration, z: Complex64) -> Result<f64> {
    if cfg.interp_points.contains(&z) || cfg.poles.contains(&z) {
        return Err(Error::ComplexEvaluation { z });
    }
    Ok(log_abs_phi(cfg, z)? / cfg.degree() as f64)
}

/// A quadrature sample on a contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSample {
    pub t: Complex64,
    pub weight: f64,
}

/// Samples of the segment from `zc` to `end`, graded geometrically toward `zc`:
/// `t = zc + s (end - zc)`, `s = e^v`, with 8-point Gauss panels in `v` over
/// `decades` decades. `count` is rounded up to a multiple of 8.
pub fn graded_segment(zc: Complex64, end: Complex64, count: usize, decades: f64) -> Result<Vec<ContourSample>> {
    if count < 2 || !(decades > 0.0) {
        return Err(invalid("graded segment needs count >= 2 and decades > 0"));
    }
    let len = (end - zc).norm();
    let vmin = -decades * std::f64::consts::LN_10;
    let panels = count.div_ceil(8);
    let dv = -vmin / panels as f64;
    let (gx, gw) = crate::gauss::gauss_legendre(8);
    let mut out = Vec::with_capacity(panels * 8);
    for p in 0..panels {
        let mid = vmin + dv * (p as f64 + 0.5);
        for (x, w) in gx.iter().zip(&gw) {
            let sv = (mid + 0.5 * dv * x).exp();
            out.push(ContourSample { t: zc + (end - zc) * sv, weight: len * sv * 0.5 * dv * w });
        }
    }
    Ok(out)
}

/// Default sample count for [`graded_segment`] contours.
pub const CONTOUR_COUNT: usize = 2000;

/// `(1/2pi) sum_j w_j |phi(x) / phi(t_j)| |t_j - zc|^(alpha - 1) * f_bound`.
///
/// Samples at a pole contribute nothing, since `1/phi` vanishes there.
pub fn hermite_error_bound_l1(
    cfg: &PointConfiguration,
    f_bound: f64,
    alpha: f64,
    zc: Complex64,
    x: Complex64,
    gamma: &[ContourSample],
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("Hölder exponent must lie in (0, 1], got {alpha}")));
    }
    if alpha < 1.0 && gamma.iter().any(|s| s.t == zc && s.weight != 0.0) {
        return Err(invalid("contour sample at the singular point carries weight"));
    }
    let lx = log_abs_phi(cfg, x)?;
    let mut total = 0.0;
    for s in gamma {
        if s.weight == 0.0 {
            continue;
        }
        let lt = match log_abs_phi(cfg, s.t) {
            Ok(v) => v,
            Err(Error::PoleEvaluation { .. }) => continue,
            Err(e) => return Err(e),
        };
        let dist = (s.t - zc).norm();
        let kernel = if alpha == 1.0 { 1.0 } else { dist.powf(alpha - 1.0) };
        total += s.weight * (lx - lt).exp() * kernel;
    }
    Ok(total * f_bound / (2.0 * PI))
}

/// Parameters of the half-strip model: potential `alpha/n * x` on the lower
/// edge right of `log eps`, zero elsewhere on the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripModel {
    pub alpha: f64,
    pub n: usize,
    pub epsilon: f64,
}

impl StripModel {
    pub fn new(alpha: f64, n: usize, epsilon: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self { alpha, n, epsilon })
    }

    /// Model with `epsilon` set to the predicted closest pole.
    pub fn for_clustering(alpha: f64, n: usize, kind: ClusterKind) -> Result<Self> {
        let pred = predict_rates(alpha, n, kind)?;
        Self::new(alpha, n, pred.closest_pole)
    }

    pub fn log_epsilon(&self) -> f64 {
        self.epsilon.ln()
    }

    /// `integral_{log eps}^0 rho = alpha (log eps)^2 / (2 pi^2)`.
    pub fn density_integral(&self) -> f64 {
        self.alpha * self.log_epsilon().powi(2) / (2.0 * PI * PI)
    }
}

fn check_strip(s: Complex64) -> Result<()> {
    if !(s.im > 0.0 && s.im < PI) || !s.re.is_finite() {
        return Err(invalid(format!("s = {s} is not inside the strip 0 < Im s < pi")));
    }
    Ok(())
}

/// Poisson-integral solution of the strip problem at `s = x + iy`.
pub fn strip_potential_exact(m: &StripModel, s: Complex64) -> Result<f64> {
    check_strip(s)?;
    let shift = s.re - m.log_epsilon();
    let y = s.im;
    let (sy, half_sin) = (y.sin(), (0.5 * y).sin());
    // cosh(u) - cos(y) = 2 sinh^2(u/2) + 2 sin^2(y/2), free of cancellation near u = 0.
    let integrand = |xi: f64| {
        let sh = (0.5 * (xi - shift)).sinh();
        xi * sy / (2.0 * sh * sh + 2.0 * half_sin * half_sin)
    };
    let upper = (shift + 40.0).max(40.0);
    let mut total = 0.0;
    let mut a = 0.0;
    for b in [shift - 5.0, shift, shift + 5.0, upper] {
        if b > a {
            total += adaptive(&integrand, a, b, 1e-13);
            a = b;
        }
    }
    Ok(m.alpha / m.n as f64 / (2.0 * PI) * total)
}

/// Bilinear approximation `alpha/n (1 - y/pi)(x - log eps)`.
pub fn strip_potential_bilinear(m: &StripModel, s: Complex64) -> f64 {
    m.alpha / m.n as f64 * (1.0 - s.im / PI) * (s.re - m.log_epsilon())
}

/// Pole density `(alpha / pi^2)(x - log eps)` for `x >= log eps`.
pub fn strip_density(m: &StripModel, x: f64) -> Result<f64> {
    let le = m.log_epsilon();
    if x < le {
        return Err(invalid(format!("x = {x} lies left of log eps = {le}")));
    }
    Ok(m.alpha / (PI * PI) * (x - le))
}

/// Predicted closest pole and accuracy for `n` poles and Hölder exponent `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePrediction {
    pub closest_pole: f64,
    pub accuracy: f64,
    /// `C` in `accuracy = exp(-sqrt(C n))`.
    pub rate_constant: f64,
}

/// Uniform: `(exp(-pi sqrt(n/alpha)), exp(-pi sqrt(alpha n)))`;
/// tapered: `(exp(-pi sqrt(2n/alpha)), exp(-pi sqrt(2 alpha n)))`.
pub fn predict_rates(alpha: f64, n: usize, kind: ClusterKind) -> Result<RatePrediction> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let factor = match kind {
        ClusterKind::Uniform => 1.0,
        ClusterKind::Tapered => 2.0,
        other => return Err(invalid(format!("no rate model for {other:?} clustering"))),
    };
    let nf = n as f64;
    Ok(RatePrediction {
        closest_pole: (-PI * (factor * nf / alpha).sqrt()).exp(),
        accuracy: (-PI * (factor * alpha * nf).sqrt()).exp(),
        rate_constant: PI * PI * factor * alpha,
    })
}
