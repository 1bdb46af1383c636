//! Dense least squares by Householder QR with column scaling and column pivoting.
//!
//! Partial-fraction bases with exponentially clustered poles are badly
//! conditioned. Columns are scaled to unit 2-norm before factorization and the
//! pivoted `R` exposes the effective rank, which callers either treat as an
//! error or truncate (basic solution with the negligible columns set to zero).

use crate::error::{invalid, Error, Result};

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (yi, aij) in y.iter_mut().zip(self.col(j)) {
                    *yi += aij * xj;
                }
            }
        }
        y
    }

    /// Multiplies row `i` by `s[i]`.
    pub fn scale_rows(&mut self, s: &[f64]) {
        assert_eq!(s.len(), self.rows);
        for j in 0..self.cols {
            for (a, si) in self.col_mut(j).iter_mut().zip(s) {
                *a *= si;
            }
        }
    }
}

/// What to do when the pivoted factorization is numerically rank deficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankPolicy {
    /// Fail with [`Error::IllPosed`].
    Strict,
    /// Drop the trailing negligible pivots and return the basic solution.
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LstsqOptions {
    /// Pivots with `|R_kk| <= rcond |R_00|` count as zero.
    pub rcond: f64,
    pub policy: RankPolicy,
}

impl Default for LstsqOptions {
    fn default() -> Self {
        Self { rcond: 1e-15, policy: RankPolicy::Strict }
    }
}

impl LstsqOptions {
    pub fn truncating(rcond: f64) -> Self {
        Self { rcond, policy: RankPolicy::Truncate }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstsqSolution {
    pub coeffs: Vec<f64>,
    pub rank: usize,
    /// `||A x - b||_2` as carried by the factorization.
    pub residual_norm: f64,
}

/// Minimizes `||A x - b||_2`.
pub fn lstsq(a: &Matrix, b: &[f64], opts: LstsqOptions) -> Result<LstsqSolution> {
    let (m, n) = (a.rows, a.cols);
    if b.len() != m {
        return Err(invalid(format!("right-hand side has {} rows, matrix has {m}", b.len())));
    }
    if n == 0 {
        let res = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        return Ok(LstsqSolution { coeffs: vec![], rank: 0, residual_norm: res });
    }
    if m < n {
        return Err(invalid(format!("least squares needs rows >= cols, got {m} x {n}")));
    }
    if a.data.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(invalid("least-squares data contain non-finite entries"));
    }

    let mut q = a.clone();
    let mut rhs = b.to_vec();

    // Column equilibration.
    let scale: Vec<f64> = (0..n)
        .map(|j| {
            let s = norm2(q.col(j));
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    for (j, &s) in scale.iter().enumerate() {
        for v in q.col_mut(j) {
            *v /= s;
        }
    }

    let mut perm: Vec<usize> = (0..n).collect();
    let mut rdiag = vec![0.0; n];
    let mut v = vec![0.0; m];

    for k in 0..n {
        // Pivot on the largest remaining column norm, recomputed exactly.
        let (mut best, mut best_norm) = (k, -1.0);
        for j in k..n {
            let s = norm2(&q.col(j)[k..]);
            if s > best_norm {
                best = j;
                best_norm = s;
            }
        }
        if best != k {
            swap_cols(&mut q, k, best);
            perm.swap(k, best);
        }

        let col = &q.col(k)[k..];
        let alpha = norm2(col);
        if alpha == 0.0 {
            rdiag[k] = 0.0;
            continue;
        }
        let x0 = col[0];
        let beta = if x0 >= 0.0 { -alpha } else { alpha };
        // v = x - beta e1, normalized so that H = I - 2 v v^T / (v^T v).
        let vlen = m - k;
        v[..vlen].copy_from_slice(col);
        v[0] -= beta;
        let vtv: f64 = v[..vlen].iter().map(|t| t * t).sum();
        rdiag[k] = beta;
        {
            let c = q.col_mut(k);
            c[k] = beta;
            for t in &mut c[k + 1..] {
                *t = 0.0;
            }
        }
        if vtv == 0.0 {
            continue;
        }
        for j in k + 1..n {
            let c = &mut q.col_mut(j)[k..];
            let dot: f64 = c.iter().zip(&v[..vlen]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vtv;
            for (ci, vi) in c.iter_mut().zip(&v[..vlen]) {
                *ci -= f * vi;
            }
        }
        let c = &mut rhs[k..];
        let dot: f64 = c.iter().zip(&v[..vlen]).map(|(a, b)| a * b).sum();
        let f = 2.0 * dot / vtv;
        for (ci, vi) in c.iter_mut().zip(&v[..vlen]) {
            *ci -= f * vi;
        }
    }

    let r00 = rdiag[0].abs();
    let rank = if r00 == 0.0 { 0 } else { rdiag.iter().take_while(|d| d.abs() > opts.rcond * r00).count() };
    if rank < n && opts.policy == RankPolicy::Strict {
        return Err(Error::IllPosed { rank, cols: n });
    }

    // Back substitution on the leading rank x rank block.
    let mut y = vec![0.0; n];
    for i in (0..rank).rev() {
        let mut s = rhs[i];
        for (j, yj) in y.iter().enumerate().take(rank).skip(i + 1) {
            s -= q.get(i, j) * yj;
        }
        y[i] = s / q.get(i, i);
    }
    let residual_norm = norm2(&rhs[rank..]);

    let mut coeffs = vec![0.0; n];
    for (k, &p) in perm.iter().enumerate() {
        coeffs[p] = y[k] / scale[p];
    }
    Ok(LstsqSolution { coeffs, rank, residual_norm })
}

fn swap_cols(a: &mut Matrix, i: usize, j: usize) {
    let m = a.rows;
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let (left, right) = a.data.split_at_mut(hi * m);
    left[lo * m..(lo + 1) * m].swap_with_slice(&mut right[..m]);
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    // Scaled to avoid overflow/underflow for extreme column entries.
    let amax = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if amax == 0.0 || !amax.is_finite() {
        return amax;
    }
    amax * x.iter().map(|v| (v / amax) * (v / amax)).sum::<f64>().sqrt()
}
