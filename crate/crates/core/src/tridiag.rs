//! Lowest eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with a pivoted tridiagonal LU factorisation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal must have n - 1 entries");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let denom = if q.abs() < tiny { tiny.copysign(q) } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * scale {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn mul(&self, x: &[f64], shift: f64, out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = (self.diag[i] - shift) * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Eigenvector for an (accurate) eigenvalue `lambda`, unit 2-norm.
    pub fn eigenvector(&self, lambda: f64, level: usize) -> Result<Vec<f64>> {
        let n = self.len();
        let lu = ShiftedLu::factor(self, lambda);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919 % 113) as f64 / 113.0)).collect();
        let mut r = vec![0.0; n];
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        let mut residual = f64::INFINITY;
        const MAX_ITER: usize = 6;
        for it in 0..MAX_ITER {
            lu.solve(&mut x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::EigenNonConvergence { level, residual: f64::NAN, iterations: it + 1 });
            }
            x.iter_mut().for_each(|v| *v /= norm);
            self.mul(&x, lambda, &mut r);
            residual = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if residual <= 1e-9 * scale && it >= 1 {
                return Ok(x);
            }
        }
        Err(Error::EigenNonConvergence { level, residual, iterations: MAX_ITER })
    }

    /// Lowest `k` eigenvalues (ascending) with unit-norm eigenvectors.
    pub fn lowest(&self, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let k = k.min(self.len());
        let values: Vec<f64> = (0..k).map(|i| self.eigenvalue(i)).collect();
        let vectors = values.iter().enumerate().map(|(i, &l)| self.eigenvector(l, i)).collect::<Result<Vec<_>>>()?;
        Ok((values, vectors))
    }
}

/// LU factors of `T - shift·I` with partial pivoting (LAPACK `gttrf` layout).
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiag, shift: f64) -> Self {
        let n = t.len();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - shift).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let scale = t.diag.iter().chain(t.off.iter()).fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        for v in d.iter_mut() {
            if v.abs() < f64::EPSILON * scale {
                *v = f64::EPSILON * scale;
            }
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
