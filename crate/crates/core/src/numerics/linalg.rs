//! Small dense complex matrices with pivoted LU determinants in log scale.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

/// Determinant represented as `exp(ln_abs) · phase` with `|phase| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub ln_abs: f64,
    pub phase: Complex64,
}

impl LogDet {
    /// The determinant as an ordinary complex number (may overflow or underflow).
    pub fn value(&self) -> Complex64 {
        self.phase * self.ln_abs.exp()
    }

    /// True when the determinant is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }
}

impl ComplexMatrix {
    /// The `n × n` zero matrix.
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// The `n × n` identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from an entry function `(row, col) -> value`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { n, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Validation(format!(
                "expected {} entries for a {n}×{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// `alpha · self + beta · other`.
    pub fn combine(&self, alpha: Complex64, other: &ComplexMatrix, beta: Complex64) -> ComplexMatrix {
        debug_assert_eq!(self.n, other.n);
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| alpha * x + beta * y)
                .collect(),
        }
    }

    /// Matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * other[(k, j)]).sum())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// In-place LU factorisation with partial pivoting. Returns the permutation
    /// parity (`true` for odd) or `None` when a zero pivot is met.
    fn lu_in_place(&mut self, perm: &mut [usize]) -> Option<bool> {
        let n = self.n;
        let mut odd = false;
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        for k in 0..n {
            let (piv, best) = (k..n)
                .map(|i| (i, self[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    self.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                odd = !odd;
            }
            let pivot = self[(k, k)];
            for i in k + 1..n {
                let factor = self[(i, k)] / pivot;
                self[(i, k)] = factor;
                if factor != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = self[(k, j)];
                        self[(i, j)] -= factor * u;
                    }
                }
            }
        }
        Some(odd)
    }

    /// Determinant in log-magnitude/phase form via pivoted LU.
    ///
    /// A singular matrix yields `ln_abs = -∞`.
    pub fn log_det(&self) -> LogDet {
        self.log_det_with_pivot_ratio().0
    }

    /// Determinant together with the ratio `min|u_kk| / max|u_kk|` of the LU
    /// pivots, a cheap proxy for the distance to singularity (0 when singular).
    pub fn log_det_with_pivot_ratio(&self) -> (LogDet, f64) {
        if self.n == 0 {
            return (
                LogDet {
                    ln_abs: 0.0,
                    phase: Complex64::new(1.0, 0.0),
                },
                1.0,
            );
        }
        let mut lu = self.clone();
        let mut perm = vec![0; self.n];
        match lu.lu_in_place(&mut perm) {
            None => (
                LogDet {
                    ln_abs: f64::NEG_INFINITY,
                    phase: Complex64::new(1.0, 0.0),
                },
                0.0,
            ),
            Some(odd) => {
                let mut ln_abs = 0.0;
                let mut phase = Complex64::new(if odd { -1.0 } else { 1.0 }, 0.0);
                let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
                for k in 0..self.n {
                    let d = lu[(k, k)];
                    let m = d.norm();
                    lo = lo.min(m);
                    hi = hi.max(m);
                    ln_abs += m.ln();
                    phase *= d / m;
                    // Renormalise to keep the phase on the unit circle.
                    phase /= phase.norm();
                }
                (LogDet { ln_abs, phase }, lo / hi)
            }
        }
    }

    /// Inverse via LU; `None` if singular.
    pub fn inverse(&self) -> Option<ComplexMatrix> {
        let n = self.n;
        let mut lu = self.clone();
        let mut perm = vec![0; n];
        lu.lu_in_place(&mut perm)?;
        let mut inv = ComplexMatrix::zeros(n);
        for col in 0..n {
            // Solve L U x = P e_col.
            let mut x: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new(if perm[i] == col { 1.0 } else { 0.0 }, 0.0))
                .collect();
            for i in 0..n {
                for k in 0..i {
                    let l = lu[(i, k)];
                    let xk = x[k];
                    x[i] -= l * xk;
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let u = lu[(i, k)];
                    let xk = x[k];
                    x[i] -= u * xk;
                }
                x[i] /= lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Some(inv)
    }

    /// Infinity-norm condition number (`∞` for singular matrices).
    pub fn condition_inf(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.norm_inf() * inv.norm_inf(),
            None => f64::INFINITY,
        }
    }

    /// Lower-triangular Cholesky factor `L` with `L L† = self` for a Hermitian
    /// positive-definite matrix, built row by row.
    ///
    /// # Errors
    /// A validation error naming the first leading minor that is not positive.
    pub fn cholesky(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        let mut l = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let s: Complex64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
                if i == j {
                    let d = self[(i, i)].re - s.re;
                    if !(d > 0.0) || !d.is_finite() {
                        return Err(Error::Validation(format!(
                            "covariance is not positive definite: leading minor {} fails",
                            i + 1
                        )));
                    }
                    l[(i, i)] = Complex64::new(d.sqrt(), 0.0);
                } else {
                    l[(i, j)] = (self[(i, j)] - s) / l[(j, j)].re;
                }
            }
        }
        Ok(l)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}
