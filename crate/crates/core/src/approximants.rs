//! Rational approximants of `sqrt(x)` on `[0, 1]` in closed, pole-residue and
//! interpolatory form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{lstsq, LstsqOptions, Matrix};

/// Relative distance to a pole below which evaluation is refused.
pub const POLE_PROXIMITY: f64 = 1e-14;

/// Choice of the base `xi` in Newman's product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XiMode {
    /// `xi = exp(-1 / sqrt(2n))`.
    Classic,
    /// `xi = exp(-(pi/2) / sqrt(2n))`.
    Improved,
}

impl XiMode {
    pub fn xi(self, n: usize) -> f64 {
        let c = match self {
            XiMode::Classic => 1.0,
            XiMode::Improved => PI / 2.0,
        };
        (-c / (2.0 * n as f64).sqrt()).exp()
    }
}

/// `sqrt(x) (p(sqrt x) - p(-sqrt x)) / (p(sqrt x) + p(-sqrt x))` with
/// `p(t) = prod_{k<2n} (t + xi^k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewmanForm {
    pub n: usize,
    pub xi: f64,
}

/// `sum_k residues_k / (z - poles_k) + sum_j poly_j z^j`.
///
/// When `origin_value` is set the value is computed as
/// `r(0) + z sum_k residues_k / (p_k (z - p_k)) + sum_{j>=1} poly_j z^j`,
/// which avoids cancelling the constant term against the pole sum near
/// `z = 0`. `poly[0]` is then only informational.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleResidue {
    pub poles: Vec<Complex64>,
    pub residues: Vec<Complex64>,
    pub poly: Vec<f64>,
    pub origin_value: Option<f64>,
}

impl PoleResidue {
    pub fn new(poles: Vec<Complex64>, residues: Vec<Complex64>, poly: Vec<f64>) -> Self {
        Self { poles, residues, poly, origin_value: None }
    }

    fn value(&self, z: Complex64) -> Complex64 {
        match self.origin_value {
            Some(r0) => {
                let tail = horner(self.poly.get(1..).unwrap_or(&[]), z) * z;
                let mut s = Complex64::new(0.0, 0.0);
                for (pk, rk) in self.poles.iter().zip(&self.residues) {
                    s += rk / (pk * (z - pk));
                }
                r0 + z * s + tail
            }
            None => {
                let mut s = horner(&self.poly, z);
                for (pk, rk) in self.poles.iter().zip(&self.residues) {
                    s += rk / (z - pk);
                }
                s
            }
        }
    }
}

/// `c_0 + sum_k c_k / (x - p_k)` interpolating `values` at `nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePoleInterpolant {
    pub nodes: Vec<f64>,
    pub poles: Vec<f64>,
    pub values: Vec<f64>,
    /// Constant term followed by one coefficient per pole.
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RationalApproximant {
    Newman(NewmanForm),
    PoleResidue(PoleResidue),
    NodePole(NodePoleInterpolant),
}

impl RationalApproximant {
    /// Number of finite poles.
    pub fn pole_count(&self) -> usize {
        match self {
            // Numerator and denominator of degree 2n in sqrt(x), so n in x.
            RationalApproximant::Newman(f) => f.n,
            RationalApproximant::PoleResidue(p) => p.poles.len(),
            RationalApproximant::NodePole(p) => p.poles.len(),
        }
    }

    /// Value at a complex point.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let v = match self {
            RationalApproximant::Newman(f) => f.evaluate(z)?,
            RationalApproximant::PoleResidue(p) => {
                check_poles(z, p.poles.iter().copied())?;
                p.value(z)
            }
            RationalApproximant::NodePole(p) => {
                check_poles(z, p.poles.iter().map(|&q| Complex64::new(q, 0.0)))?;
                let mut s = Complex64::new(p.coeffs[0], 0.0);
                for (pk, ck) in p.poles.iter().zip(&p.coeffs[1..]) {
                    s += ck / (z - pk);
                }
                s
            }
        };
        if !v.is_finite() {
            return Err(Error::ComplexEvaluation { z });
        }
        Ok(v)
    }

    /// Real part of the value at a real point.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            RationalApproximant::NodePole(p) => {
                check_poles(Complex64::new(x, 0.0), p.poles.iter().map(|&q| Complex64::new(q, 0.0)))?;
                let mut s = p.coeffs[0];
                for (pk, ck) in p.poles.iter().zip(&p.coeffs[1..]) {
                    s += ck / (x - pk);
                }
                if !s.is_finite() {
                    return Err(Error::Evaluation { x });
                }
                Ok(s)
            }
            _ => self.evaluate(Complex64::new(x, 0.0)).map(|v| v.re).map_err(|e| match e {
                Error::ComplexEvaluation { .. } => Error::Evaluation { x },
                other => other,
            }),
        }
    }
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &cj| acc * z + cj)
}

fn check_poles(z: Complex64, poles: impl Iterator<Item = Complex64>) -> Result<()> {
    for (index, pole) in poles.enumerate() {
        if (z - pole).norm() <= POLE_PROXIMITY * pole.norm() || z == pole {
            return Err(Error::PoleEvaluation { index, pole });
        }
    }
    Ok(())
}

impl NewmanForm {
    /// Evaluates through `q = p(-t) / p(t)` as a product of factors of modulus
    /// at most one on the principal branch, so it cannot overflow.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let t = z.sqrt();
        if t == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut q = Complex64::new(1.0, 0.0);
        let mut xk = 1.0;
        for _ in 0..2 * self.n {
            q *= (xk - t) / (xk + t);
            xk *= self.xi;
        }
        let den = 1.0 + q;
        if den.norm() <= f64::EPSILON * 1e-2 {
            return Err(Error::ComplexEvaluation { z });
        }
        Ok(t * (1.0 - q) / den)
    }
}

/// Newman's approximant of degree `n`.
pub fn newman(n: usize, mode: XiMode) -> Result<RationalApproximant> {
    if n == 0 {
        return Err(invalid("Newman degree must be at least 1"));
    }
    Ok(RationalApproximant::Newman(NewmanForm { n, xi: mode.xi(n) }))
}

/// Default trapezoidal step `pi sqrt(2 / n)`.
pub fn trapezoidal_default_step(n: usize) -> f64 {
    PI * (2.0 / n as f64).sqrt()
}

fn trapezoid_offsets(n: usize) -> impl Iterator<Item = f64> {
    let half = (n as f64 - 1.0) / 2.0;
    (0..n).map(move |j| j as f64 - half)
}

fn check_trapezoid(n: usize, h: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("trapezoidal approximant needs n >= 1"));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid(format!("step h must be positive, got {h}")));
    }
    Ok(())
}

/// `(2hx/pi) sum_k e^{kh} / (e^{2kh} + x)` in pole-residue form.
///
/// Each term is rewritten as `c_k + c_k p_k / (x - p_k)` with `p_k = -e^{2kh}`
/// and `c_k = (2h/pi) e^{kh}`, so the constant term is `sum c_k`. The form is
/// anchored at `r(0) = 0`.
pub fn trapezoidal_sqrt(n: usize, h: Option<f64>) -> Result<RationalApproximant> {
    let h = h.unwrap_or_else(|| trapezoidal_default_step(n));
    check_trapezoid(n, h)?;
    let mut poles = Vec::with_capacity(n);
    let mut residues = Vec::with_capacity(n);
    let mut constant = 0.0;
    for k in trapezoid_offsets(n) {
        let c = 2.0 * h / PI * (k * h).exp();
        let p = -(2.0 * k * h).exp();
        poles.push(Complex64::new(p, 0.0));
        residues.push(Complex64::new(c * p, 0.0));
        constant += c;
    }
    Ok(RationalApproximant::PoleResidue(PoleResidue { poles, residues, poly: vec![constant], origin_value: Some(0.0) }))
}

/// Direct summation of the trapezoidal approximant at `x >= 0`.
pub fn trapezoidal_sqrt_direct(n: usize, h: Option<f64>, x: f64) -> Result<f64> {
    let h = h.unwrap_or_else(|| trapezoidal_default_step(n));
    check_trapezoid(n, h)?;
    let s: f64 = trapezoid_offsets(n).map(|k| (k * h).exp() / ((2.0 * k * h).exp() + x)).sum();
    Ok(2.0 * h * x / PI * s)
}

/// Default interpolation step `pi / sqrt(n)`.
pub fn stenger_default_step(n: usize) -> f64 {
    PI / (n as f64).sqrt()
}

/// Interpolant of `f` at `0, x_1..x_n` with poles `-x_k`, `x_k = exp(-(k-1) h)`.
pub fn stenger_interpolant<F: Fn(f64) -> f64>(f: F, n: usize, h: Option<f64>) -> Result<RationalApproximant> {
    if n == 0 {
        return Err(invalid("interpolant needs n >= 1"));
    }
    let h = h.unwrap_or_else(|| stenger_default_step(n));
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid(format!("step h must be positive, got {h}")));
    }
    let mut nodes = vec![0.0];
    nodes.extend((0..n).map(|k| (-(k as f64) * h).exp()));
    let poles: Vec<f64> = nodes[1..].iter().map(|x| -x).collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Evaluation { x: nodes[i] });
    }
    let mut a = Matrix::zeros(n + 1, n + 1);
    for (i, &x) in nodes.iter().enumerate() {
        a.set(i, 0, 1.0);
        for (k, &p) in poles.iter().enumerate() {
            a.set(i, k + 1, 1.0 / (x - p));
        }
    }
    let sol = lstsq(&a, &values, LstsqOptions { rcond: f64::EPSILON * (n + 1) as f64 * 1e-2, ..Default::default() })?;
    Ok(RationalApproximant::NodePole(NodePoleInterpolant { nodes, poles, values, coeffs: sol.coeffs }))
}

impl NodePoleInterpolant {
    /// Largest `|r(x_i) - v_i| / max(|v_i|, 1)` over the nodes.
    pub fn node_residual(&self) -> f64 {
        let r = RationalApproximant::NodePole(self.clone());
        self.nodes.iter().zip(&self.values).map(|(&x, &v)| (r.eval(x).unwrap_or(f64::INFINITY) - v).abs() / v.abs().max(1.0)).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sup_error_with, GradedGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sqrt_error(r: &RationalApproximant) -> f64 {
        let g = GradedGrid::logspace(-15.0, 0.0, 20_000).unwrap().with_origin();
        sup_error_with(f64::sqrt, |x| r.eval(x), &g).unwrap().norm_inf()
    }

    #[test]
    fn pole_residue_unit_example() {
        let r = RationalApproximant::PoleResidue(PoleResidue::new(vec![Complex64::new(-1.0, 0.0)], vec![Complex64::new(1.0, 0.0)], vec![]));
        assert_eq!(r.eval(0.0).unwrap(), 1.0);
        assert_eq!(r.eval(-1.0).unwrap_err(), Error::PoleEvaluation { index: 0, pole: Complex64::new(-1.0, 0.0) });
    }

    #[test]
    fn pole_residue_negative_residue() {
        let r = RationalApproximant::PoleResidue(PoleResidue::new(vec![Complex64::new(-1.0, 0.0)], vec![Complex64::new(-1.0, 0.0)], vec![]));
        assert_eq!(r.eval(0.0).unwrap(), -1.0);
    }

    #[test]
    fn anchored_form_matches_plain_form() {
        let poles = vec![Complex64::new(-0.5, 0.0), Complex64::new(-2.0, 1.0)];
        let residues = vec![Complex64::new(1.5, 0.0), Complex64::new(0.25, -0.5)];
        let plain = PoleResidue::new(poles.clone(), residues.clone(), vec![0.3, 2.0]);
        let r0 = plain.value(Complex64::new(0.0, 0.0)).re;
        // The imaginary part at 0 is not representable in the anchor, so use a real-symmetric check point set.
        let anchored = PoleResidue { origin_value: Some(r0), ..plain.clone() };
        let shift = plain.value(Complex64::new(0.0, 0.0)) - r0;
        for z in [Complex64::new(0.3, 0.1), Complex64::new(-3.0, 2.0), Complex64::new(1.0, 0.0)] {
            assert!((plain.value(z) - anchored.value(z) - shift).norm() < 1e-14);
        }
    }

    #[test]
    fn newman_vanishes_at_origin_and_is_positive() {
        for n in [1, 4, 20, 200] {
            for mode in [XiMode::Classic, XiMode::Improved] {
                let r = newman(n, mode).unwrap();
                assert_eq!(r.eval(0.0).unwrap(), 0.0);
                let v1 = r.eval(1.0).unwrap();
                assert!(v1 > 0.0 && v1 < 2.0, "n={n} r(1)={v1}");
                for x in [1e-12, 1e-6, 0.3] {
                    assert!(r.eval(x).unwrap() > 0.0);
                }
            }
        }
        assert!(newman(0, XiMode::Classic).is_err());
    }

    #[test]
    fn newman_matches_direct_product_formula() {
        let n = 5;
        let xi = XiMode::Classic.xi(n);
        let p = |t: f64| (0..2 * n).map(|k| t + xi.powi(k as i32)).product::<f64>();
        let r = newman(n, XiMode::Classic).unwrap();
        for x in [0.01, 0.2, 0.7, 1.0] {
            let t: f64 = f64::sqrt(x);
            let direct = t * (p(t) - p(-t)) / (p(t) + p(-t));
            assert!((r.eval(x).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn trapezoid_poles_and_origin() {
        let n = 7;
        let h = trapezoidal_default_step(n);
        let RationalApproximant::PoleResidue(p) = trapezoidal_sqrt(n, None).unwrap() else { panic!() };
        for (j, pole) in p.poles.iter().enumerate() {
            let k = j as f64 - 3.0;
            assert_eq!(pole.re, -(2.0 * k * h).exp());
        }
        assert_eq!(trapezoidal_sqrt_direct(n, None, 0.0).unwrap(), 0.0);
        assert_eq!(trapezoidal_sqrt_direct(8, None, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn trapezoid_even_n_uses_half_integers() {
        let offsets: Vec<f64> = trapezoid_offsets(4).collect();
        assert_eq!(offsets, vec![-1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn trapezoid_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 4, 5, 20, 36, 80] {
            let r = trapezoidal_sqrt(n, None).unwrap();
            assert_eq!(r.eval(0.0).unwrap(), 0.0);
            for i in 0..1000 {
                let x = if i % 2 == 0 { rng.random_range(1e-12..1.0) } else { 10f64.powf(rng.random_range(-12.0..0.0)) };
                let a = r.eval(x).unwrap();
                let b = trapezoidal_sqrt_direct(n, None, x).unwrap();
                assert!((a - b).abs() <= 1e-13 * b.abs(), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn stenger_interpolates_and_reproduces_constants() {
        for n in [1, 4, 16, 30, 40] {
            let RationalApproximant::NodePole(p) = stenger_interpolant(f64::sqrt, n, None).unwrap() else { panic!() };
            assert!(p.node_residual() <= 1e-11, "n={n} residual {}", p.node_residual());
        }
        let RationalApproximant::NodePole(c) = stenger_interpolant(|_| 2.5, 10, None).unwrap() else { panic!() };
        assert!((c.coeffs[0] - 2.5).abs() < 1e-12);
        assert!(c.coeffs[1..].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn stenger_error_at_twenty_is_small() {
        let e = sqrt_error(&stenger_interpolant(f64::sqrt, 20, None).unwrap());
        assert!(e < 1e-2 && e > 1e-6, "e = {e}");
    }

    #[test]
    fn errors_decrease_on_square_indices() {
        let ns = [4, 9, 16, 25, 36];
        let fams: Vec<Box<dyn Fn(usize) -> RationalApproximant>> = vec![
            Box::new(|n| newman(n, XiMode::Classic).unwrap()),
            Box::new(|n| trapezoidal_sqrt(n, None).unwrap()),
            Box::new(|n| stenger_interpolant(f64::sqrt, n, None).unwrap()),
        ];
        for fam in &fams {
            let errs: Vec<f64> = ns.iter().map(|&n| sqrt_error(&fam(n))).collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        }
    }
}
