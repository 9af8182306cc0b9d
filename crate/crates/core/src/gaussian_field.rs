//! The complex Ginibre random field `p ↦ K(p)` on the unit circle with entry
//! covariance `E[K_{ab}(p) conj K_{ab}(q)] = C(p, q)`: its one-pair partition
//! function, its mean winding number and a Monte Carlo check of the former.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::curves::CurvePair;
use crate::error::{Error, Result};
use crate::numerics::{circle_integral, QuadratureSpec};
use crate::sampling::{covariance_factor, grf_matrices, ginue_matrix, RandomStream};

/// Covariance kernel of a Ginibre random field on the circle.
///
/// `evaluate(p, q)` must be Hermitian and positive definite on finite point
/// sets; `d1_evaluate` is the complex derivative in the first slot, supplied
/// analytically.
pub trait CovarianceKernel: Send + Sync {
    /// Registry name.
    fn name(&self) -> &'static str;
    /// `C(p, q)`.
    fn evaluate(&self, p: Complex64, q: Complex64) -> Complex64;
    /// `∂_p C(p, q)`.
    fn d1_evaluate(&self, p: Complex64, q: Complex64) -> Complex64;
}

/// The kernel `C(p, q) = ν(q)†ν(p) = a(p)conj a(q) + b(p)conj b(q)` induced
/// by the additive two-matrix model with independent GinUE `K₁, K₂`.
#[derive(Debug, Clone)]
pub struct InducedKernel {
    pub curve: CurvePair,
}

impl InducedKernel {
    pub fn new(curve: CurvePair) -> Self {
        InducedKernel { curve }
    }
}

impl CovarianceKernel for InducedKernel {
    fn name(&self) -> &'static str {
        "induced"
    }
    fn evaluate(&self, p: Complex64, q: Complex64) -> Complex64 {
        let [ap, bp] = self.curve.nu(p);
        let [aq, bq] = self.curve.nu(q);
        ap * aq.conj() + bp * bq.conj()
    }
    fn d1_evaluate(&self, p: Complex64, q: Complex64) -> Complex64 {
        let [da, db] = self.curve.nu_prime(p);
        let [aq, bq] = self.curve.nu(q);
        da * aq.conj() + db * bq.conj()
    }
}

/// A kernel tabulated on the uniform `M × M` grid `(e^{2πi j/M}, e^{2πi l/M})`
/// together with its first-slot derivative, interpolated spectrally
/// (tensor-product trigonometric interpolation; for even `M` the Nyquist mode
/// is split symmetrically so real-valued data interpolate to real values).
#[derive(Debug, Clone)]
pub struct UserGridKernel {
    m: usize,
    values: Vec<Complex64>,
    derivatives: Vec<Complex64>,
}

impl UserGridKernel {
    /// `values[j·M + l] = C(p_j, p_l)`, `derivatives[j·M + l] = ∂₁C(p_j, p_l)`.
    ///
    /// # Errors
    /// Validation error when the table sizes disagree, `M < 4`, the value
    /// table is not Hermitian to `1e-12` (relative), or a diagonal entry is not
    /// positive.
    pub fn new(m: usize, values: Vec<Complex64>, derivatives: Vec<Complex64>) -> Result<Self> {
        if m < 4 {
            return Err(Error::Validation("user-grid kernels need at least 4 grid points".into()));
        }
        if values.len() != m * m || derivatives.len() != m * m {
            return Err(Error::Validation(format!("user-grid tables must have {} entries", m * m)));
        }
        let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for j in 0..m {
            let d = values[j * m + j];
            if !(d.re > 0.0) || d.im.abs() > 1e-12 * scale {
                return Err(Error::Validation(format!("diagonal entry {j} of the covariance is not positive")));
            }
            for l in 0..j {
                if (values[j * m + l] - values[l * m + j].conj()).norm() > 1e-12 * scale {
                    return Err(Error::Validation(format!("covariance table is not Hermitian at ({j}, {l})")));
                }
            }
        }
        Ok(UserGridKernel { m, values, derivatives })
    }

    /// Tabulates another kernel on the `M × M` grid.
    pub fn tabulate(kernel: &dyn CovarianceKernel, m: usize) -> Result<Self> {
        let pts: Vec<Complex64> = (0..m).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / m as f64)).collect();
        let mut values = Vec::with_capacity(m * m);
        let mut derivatives = Vec::with_capacity(m * m);
        for &p in &pts {
            for &q in &pts {
                values.push(kernel.evaluate(p, q));
                derivatives.push(kernel.d1_evaluate(p, q));
            }
        }
        UserGridKernel::new(m, values, derivatives)
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    /// Cardinal trigonometric interpolation weights at angle `theta`.
    fn weights(&self, theta: f64) -> Vec<f64> {
        let m = self.m;
        let half = m / 2;
        (0..m)
            .map(|j| {
                let d = theta - TAU * j as f64 / m as f64;
                let mut s = 1.0;
                let top = if m % 2 == 0 { half - 1 } else { half };
                for k in 1..=top {
                    s += 2.0 * (k as f64 * d).cos();
                }
                if m % 2 == 0 {
                    s += (half as f64 * d).cos();
                }
                s / m as f64
            })
            .collect()
    }

    fn interpolate(&self, table: &[Complex64], p: Complex64, q: Complex64) -> Complex64 {
        let wp = self.weights(p.arg());
        let wq = self.weights(q.arg());
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &a) in wp.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let row = &table[j * self.m..(j + 1) * self.m];
            let inner: Complex64 = row.iter().zip(&wq).map(|(v, &b)| v * b).sum();
            acc += inner * a;
        }
        acc
    }
}

impl CovarianceKernel for UserGridKernel {
    fn name(&self) -> &'static str {
        "user-grid"
    }
    fn evaluate(&self, p: Complex64, q: Complex64) -> Complex64 {
        self.interpolate(&self.values, p, q)
    }
    fn d1_evaluate(&self, p: Complex64, q: Complex64) -> Complex64 {
        self.interpolate(&self.derivatives, p, q)
    }
}

/// `E[det K(p)/det K(q)] = (C(p, q)/C(q, q))^N`.
///
/// # Errors
/// Validation error when `C(q, q)` is not positive; domain error for `n = 0`.
///
/// # Example
/// ```
/// use num_complex::Complex64;
/// use winding_rmt::curves::monomial_curve;
/// use winding_rmt::gaussian_field::{grf_partition, InducedKernel};
/// let k = InducedKernel::new(monomial_curve(1.0, 1, 1.0, 0).unwrap());
/// let p = Complex64::from_polar(1.0, 0.4);
/// assert!((grf_partition(&k, p, p, 3).unwrap() - 1.0).norm() < 1e-15);
/// ```
pub fn grf_partition(kernel: &dyn CovarianceKernel, p: Complex64, q: Complex64, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::domain("grf_partition", "matrix size must be positive"));
    }
    let cqq = kernel.evaluate(q, q);
    if !(cqq.re > 0.0) {
        return Err(Error::Validation(format!("covariance C(q, q) = {cqq} is not positive")));
    }
    if p == q {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok((kernel.evaluate(p, q) / cqq).powu(n as u32))
}

/// `N (1/2πi)∮ ∂₁C(p, p)/C(p, p) dp` by the periodic trapezoid rule.
///
/// # Errors
/// Accuracy error when the imaginary residue exceeds `1e-8`;
/// validation error when `C(p, p)` is not positive at a node.
pub fn grf_mean_winding(kernel: &dyn CovarianceKernel, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("grf_mean_winding", "matrix size must be positive"));
    }
    let failure = std::cell::Cell::new(false);
    let value = circle_integral(
        |p| {
            let c = kernel.evaluate(p, p);
            if !(c.re > 0.0) {
                failure.set(true);
            }
            kernel.d1_evaluate(p, p) / c
        },
        spec,
    )?;
    if failure.get() {
        return Err(Error::Validation("covariance C(p, p) is not positive on the circle".into()));
    }
    let value = value * n as f64;
    if value.im.abs() > 1e-8 {
        return Err(Error::Accuracy {
            op: "grf_mean_winding",
            estimate: value.re,
            error_bound: value.im.abs(),
        });
    }
    Ok(value.re)
}

/// Monte Carlo estimate of `E[det K(p)/det K(q)]` next to its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct GrfCheck {
    pub mc_value: Complex64,
    /// Standard error of the complex mean (`√((var Re + var Im)/trials)`).
    pub stderr: f64,
    pub closed_form: Complex64,
    pub trials: u64,
    /// Set when `stderr/|mc_value| > 0.2` (heavy-tailed ratio).
    pub warning: Option<String>,
}

/// Draws `trials` correlated pairs `(K(p), K(q))` via the Cholesky
/// construction and averages `det K(p)/det K(q)`.
///
/// Trial `t` uses the sub-stream [`RandomStream::trial`]`(t)`.
///
/// # Errors
/// Configuration error for `trials < 1000` or `n > 6`; validation error when the
/// covariance is not positive definite on `{p, q}`.
pub fn grf_mc_check(
    kernel: &dyn CovarianceKernel,
    p: Complex64,
    q: Complex64,
    n: usize,
    trials: u64,
    stream: RandomStream,
) -> Result<GrfCheck> {
    if trials < 1000 {
        return Err(Error::Config(format!("at least 1000 trials are required, got {trials}")));
    }
    if n == 0 || n > 6 {
        return Err(Error::Config(format!("grf_mc_check supports 1 ≤ n ≤ 6, got {n}")));
    }
    let closed_form = grf_partition(kernel, p, q, n)?;
    let coincident = p == q;
    let factor = if coincident {
        None
    } else {
        Some(covariance_factor(&[p, q], &|x, y| kernel.evaluate(x, y))?)
    };
    let samples: Vec<Complex64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream.trial(t).rng();
            match &factor {
                // Both determinants come from the same matrix.
                None => {
                    let k = ginue_matrix(n, &mut rng);
                    let d = k.log_det();
                    if d.is_zero() {
                        Complex64::new(f64::NAN, 0.0)
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                }
                Some(l) => {
                    let ks = grf_matrices(l, n, &mut rng);
                    let (dp, dq) = (ks[0].log_det(), ks[1].log_det());
                    Complex64::from_polar((dp.ln_abs - dq.ln_abs).exp(), 0.0) * dp.phase * dq.phase.conj()
                }
            }
        })
        .collect();
    if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
        return Err(Error::numerical("grf_mc_check", "a sampled determinant vanished"));
    }
    let t = trials as f64;
    let mean: Complex64 = samples.iter().sum::<Complex64>() / t;
    let var = samples.iter().map(|s| (s - mean).norm_sqr()).sum::<f64>() / (t - 1.0);
    let stderr = (var / t).sqrt();
    let warning = (stderr > 0.2 * mean.norm())
        .then(|| format!("heavy-tailed determinant ratio: stderr {stderr:.3e} vs |mean| {:.3e}", mean.norm()));
    Ok(GrfCheck {
        mc_value: mean,
        stderr,
        closed_form,
        trials,
        warning,
    })
}
