//! tanh and tanh-sinh rules on `[-1, 1]` and contour diagnostics of their
//! associated rational functions `r(t) = sum w_k / (t - x_k)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::gauss::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    /// `g(s) = tanh(s)`.
    Tanh,
    /// `g(s) = tanh((pi/2) sinh(s))`.
    TanhSinh,
}

/// The map `g: R -> (-1, 1)` behind a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VariableTransform {
    pub kind: TransformKind,
}

impl VariableTransform {
    pub fn new(kind: TransformKind) -> Self {
        Self { kind }
    }

    fn inner(&self, s: f64) -> f64 {
        match self.kind {
            TransformKind::Tanh => s,
            TransformKind::TanhSinh => FRAC_PI_2 * s.sinh(),
        }
    }

    pub fn g(&self, s: f64) -> f64 {
        self.inner(s).tanh()
    }

    pub fn g_prime(&self, s: f64) -> f64 {
        let u = self.inner(s);
        let sech2 = sech_squared(u);
        match self.kind {
            TransformKind::Tanh => sech2,
            TransformKind::TanhSinh => FRAC_PI_2 * s.cosh() * sech2,
        }
    }

    /// `1 - |g(s)|` without cancellation.
    pub fn endpoint_distance(&self, s: f64) -> f64 {
        2.0 / (1.0 + (2.0 * self.inner(s).abs()).exp())
    }
}

fn sech_squared(u: f64) -> f64 {
    // 4 e^{-2|u|} / (1 + e^{-2|u|})^2 stays finite for every u.
    let e = (-2.0 * u.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    /// `pi / sqrt(n)` for tanh, `1.2 log(2 pi n) / n` for tanh-sinh.
    Default,
    Explicit(f64),
}

pub fn default_step(kind: TransformKind, n: usize) -> f64 {
    let nf = n as f64;
    match kind {
        TransformKind::Tanh => PI / nf.sqrt(),
        TransformKind::TanhSinh => 1.2 * (2.0 * PI * nf).ln() / nf,
    }
}

/// Nodes `g(kh)` and weights `h g'(kh)`, `k = -(n-1)/2 .. (n-1)/2`.
///
/// Near the endpoints the nodes may round to `+-1`; `one_plus` and `one_minus`
/// keep `1 + x_k` and `1 - x_k` to full relative accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub transform: VariableTransform,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub one_plus: Vec<f64>,
    pub one_minus: Vec<f64>,
    pub h: f64,
    pub n: usize,
}

pub fn build_rule(kind: TransformKind, n: usize, step: StepMode) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(invalid("quadrature rule needs n >= 1"));
    }
    let h = match step {
        StepMode::Default => default_step(kind, n),
        StepMode::Explicit(h) => h,
    };
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid(format!("step h must be positive, got {h}")));
    }
    let tr = VariableTransform::new(kind);
    let half = (n as f64 - 1.0) / 2.0;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut one_plus = vec![0.0; n];
    let mut one_minus = vec![0.0; n];
    // Fill the right half and mirror, so the symmetry is exact.
    for j in n / 2..n {
        let s = (j as f64 - half) * h;
        let (x, w, d) = (tr.g(s), h * tr.g_prime(s), tr.endpoint_distance(s));
        let m = n - 1 - j;
        nodes[j] = x;
        nodes[m] = -x;
        weights[j] = w;
        weights[m] = w;
        one_minus[j] = d;
        one_plus[m] = d;
        one_plus[j] = 2.0 - d;
        one_minus[m] = 2.0 - d;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { transform: tr, nodes, weights, one_plus, one_minus, h, n })
}

impl QuadratureRule {
    pub fn kind(&self) -> TransformKind {
        self.transform.kind
    }
}

/// `sum w_k f(x_k)`.
pub fn integrate<F: Fn(f64) -> f64>(rule: &QuadratureRule, f: F) -> Result<f64> {
    integrate_with_endpoints(rule, |x, _, _| f(x))
}

/// `sum w_k f(x_k, 1 + x_k, 1 - x_k)`, for integrands singular at `+-1`.
///
/// Mirror-image nodes are summed in pairs, so odd integrands give exactly 0.
pub fn integrate_with_endpoints<F: Fn(f64, f64, f64) -> f64>(rule: &QuadratureRule, f: F) -> Result<f64> {
    let term = |k: usize| {
        let x = rule.nodes[k];
        let v = f(x, rule.one_plus[k], rule.one_minus[k]);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { x })
        }
    };
    let n = rule.n;
    let mut s = 0.0;
    for k in 0..n / 2 {
        s += rule.weights[k] * (term(k)? + term(n - 1 - k)?);
    }
    if n % 2 == 1 {
        s += rule.weights[n / 2] * term(n / 2)?;
    }
    Ok(s)
}

/// `1 + x_k` over the nodes left of the midpoint, ascending.
pub fn endpoint_distances(rule: &QuadratureRule) -> Vec<f64> {
    let mut d: Vec<f64> = rule.one_plus[..rule.n / 2].to_vec();
    d.sort_by(|a, b| a.total_cmp(b));
    d
}

fn on_cut(t: Complex64) -> bool {
    t.im == 0.0 && t.re.abs() <= 1.0
}

/// `log((t + 1) / (t - 1))` on the principal branch, cut along `[-1, 1]`.
pub fn characteristic_phi(t: Complex64) -> Result<Complex64> {
    if on_cut(t) || !t.is_finite() {
        return Err(Error::BranchCut { t });
    }
    let w = t.inv();
    if w.norm() < 0.5 {
        // 2 atanh(1/t) by its series, accurate for large |t|.
        let w2 = w * w;
        let mut term = w;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..200 {
            let add = term / (2 * k + 1) as f64;
            sum += add;
            if add.norm() <= 1e-17 * sum.norm() {
                break;
            }
            term *= w2;
        }
        return Ok(2.0 * sum);
    }
    Ok(((t + 1.0) / (t - 1.0)).ln())
}

/// `sum w_k / (t - x_k)`.
pub fn rule_rational(rule: &QuadratureRule, t: Complex64) -> Result<Complex64> {
    let mut s = Complex64::new(0.0, 0.0);
    for (index, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let d = t - x;
        if d == Complex64::new(0.0, 0.0) {
            return Err(Error::PoleEvaluation { index, pole: Complex64::new(x, 0.0) });
        }
        s += w / d;
    }
    Ok(s)
}

/// The same function summed directly from `h`, `g(kh)` and `g'(kh)`.
pub fn rule_rational_closed_form(kind: TransformKind, n: usize, h: f64, t: Complex64) -> Result<Complex64> {
    let tr = VariableTransform::new(kind);
    let half = (n as f64 - 1.0) / 2.0;
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let kh = (j as f64 - half) * h;
        let x = tr.g(kh);
        let d = t - x;
        if d == Complex64::new(0.0, 0.0) {
            return Err(Error::PoleEvaluation { index: j, pole: Complex64::new(x, 0.0) });
        }
        s += tr.g_prime(kh) / d;
    }
    Ok(h * s)
}

/// `phi(t) - r(t)` at `t = -1 - delta`, with `t - x_k = -(delta + (1 + x_k))`.
pub fn phi_minus_r_left(rule: &QuadratureRule, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::BranchCut { t: Complex64::new(-1.0 - delta, 0.0) });
    }
    let phi = (delta / (2.0 + delta)).ln();
    let r: f64 = rule.weights.iter().zip(&rule.one_plus).map(|(w, op)| -w / (delta + op)).sum();
    Ok(phi - r)
}

/// `phi(t) - r(t)` at `t = 1 + delta`.
pub fn phi_minus_r_right(rule: &QuadratureRule, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::BranchCut { t: Complex64::new(1.0 + delta, 0.0) });
    }
    let phi = ((2.0 + delta) / delta).ln();
    let r: f64 = rule.weights.iter().zip(&rule.one_minus).map(|(w, om)| w / (delta + om)).sum();
    Ok(phi - r)
}

/// Closed contour around `[-1, 1]`, traversed counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contour {
    Rectangle {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    },
    /// `t = a cos(theta) + i b sin(theta)`.
    Ellipse {
        a: f64,
        b: f64,
    },
}

/// Composite Gauss panels per rectangle side, or trapezoid points on an ellipse / 8.
pub const CONTOUR_PANELS: usize = 64;

impl Contour {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Contour::Rectangle { x0, x1, y0, y1 } => x0 < -1.0 && x1 > 1.0 && y0 < 0.0 && y1 > 0.0,
            Contour::Ellipse { a, b } => a > 1.0 && b > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("contour {self:?} does not enclose [-1, 1] strictly")))
        }
    }

    /// Points `t_j` and complex weights `dt_j` of a quadrature on the contour.
    pub fn discretize(&self, panels: usize) -> Result<Vec<(Complex64, Complex64)>> {
        self.validate()?;
        let mut out = Vec::new();
        match *self {
            Contour::Rectangle { x0, x1, y0, y1 } => {
                let (gx, gw) = gauss_legendre(8);
                let corners = [Complex64::new(x0, y0), Complex64::new(x1, y0), Complex64::new(x1, y1), Complex64::new(x0, y1)];
                for i in 0..4 {
                    let (a, b) = (corners[i], corners[(i + 1) % 4]);
                    let step = (b - a) / panels as f64;
                    for p in 0..panels {
                        let mid = a + step * (p as f64 + 0.5);
                        for (x, w) in gx.iter().zip(&gw) {
                            out.push((mid + step * (0.5 * x), step * (0.5 * w)));
                        }
                    }
                }
            }
            Contour::Ellipse { a, b } => {
                let m = 8 * panels;
                let dth = 2.0 * PI / m as f64;
                for j in 0..m {
                    let th = dth * j as f64;
                    let t = Complex64::new(a * th.cos(), b * th.sin());
                    let dt = Complex64::new(-a * th.sin(), b * th.cos()) * dth;
                    out.push((t, dt));
                }
            }
        }
        Ok(out)
    }
}

/// Both sides of `I - I_n = (1/2 pi i) oint f(t) (phi(t) - r(t)) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtmCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub integral: f64,
    pub rule_sum: f64,
}

impl GtmCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Tanh-sinh size used for reference integrals when none is supplied.
pub const REFERENCE_N: usize = 200;

/// Evaluates both sides of the contour identity. `reference` defaults to the
/// 200-point tanh-sinh value of the integral.
pub fn gtm_error_identity_check<F>(rule: &QuadratureRule, f: F, contour: Contour, reference: Option<f64>) -> Result<GtmCheck>
where
    F: Fn(Complex64) -> Complex64,
{
    let pts = contour.discretize(CONTOUR_PANELS)?;
    let real_f = |x: f64| f(Complex64::new(x, 0.0)).re;
    let integral = match reference {
        Some(v) => v,
        None => integrate(&build_rule(TransformKind::TanhSinh, REFERENCE_N, StepMode::Default)?, real_f)?,
    };
    let rule_sum = integrate(rule, real_f)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, dt) in pts {
        acc += f(t) * (characteristic_phi(t)? - rule_rational(rule, t)?) * dt;
    }
    let rhs = acc / Complex64::new(0.0, 2.0 * PI);
    if !rhs.is_finite() {
        return Err(invalid("contour integral is not finite"));
    }
    Ok(GtmCheck { lhs: integral - rule_sum, rhs: rhs.re, integral, rule_sum })
}

/// `int_a^b |phi(t) - r(t)| dt` over a real segment outside `(-1, 1)`, graded
/// geometrically toward the endpoint `+-1` through `t = -+(1 + e^v)`.
pub fn gtm_l1_norm(rule: &QuadratureRule, a: f64, b: f64) -> Result<f64> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("segment [{a}, {b}] is not a finite interval")));
    }
    if a == b {
        return Ok(0.0);
    }
    let (d0, d1, left) = if b <= -1.0 {
        (-1.0 - b, -1.0 - a, true)
    } else if a >= 1.0 {
        (a - 1.0, b - 1.0, false)
    } else {
        return Err(invalid(format!("segment [{a}, {b}] meets (-1, 1)")));
    };
    let err = |delta: f64| if left { phi_minus_r_left(rule, delta) } else { phi_minus_r_right(rule, delta) };
    let v0 = if d0 > 0.0 { d0.ln() } else { L1_LOWEST_LOG };
    let v1 = d1.ln();
    if v1 <= v0 {
        return Ok(0.0);
    }
    // The integrand in v is delta |err(delta)|; panels are split at sign
    // changes of err so that each Gauss panel sees a smooth function.
    let signed = |v: f64| -> Result<f64> {
        let delta = v.exp();
        Ok(delta * err(delta)?)
    };
    let (gx, gw) = gauss_legendre(10);
    let gauss = |lo: f64, hi: f64| -> Result<f64> {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut s = 0.0;
        for (x, w) in gx.iter().zip(&gw) {
            s += w * signed(mid + half * x)?.abs();
        }
        Ok(half * s)
    };
    let panels = ((v1 - v0) * 20.0).ceil().max(1.0) as usize;
    let dv = (v1 - v0) / panels as f64;
    let mut total = 0.0;
    let mut lo = v0;
    let mut f_lo = signed(lo)?;
    for p in 0..panels {
        let hi = if p + 1 == panels { v1 } else { v0 + dv * (p + 1) as f64 };
        let f_hi = signed(hi)?;
        if f_lo.signum() != f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
            let (mut a, mut b, fa) = (lo, hi, f_lo);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if signed(m)?.signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let root = 0.5 * (a + b);
            total += gauss(lo, root)? + gauss(root, hi)?;
        } else {
            total += gauss(lo, hi)?;
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(total)
}

/// Log-distance below which the endpoint piece of a 1-norm is dropped.
const L1_LOWEST_LOG: f64 = -100.0;
