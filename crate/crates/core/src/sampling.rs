//! Random generation: Ginibre matrices, eigenvalues of the generalised ratio
//! `K₁⁻¹K₂` under the `ω̂` determinantal process, and correlated Ginibre
//! fields via a Cholesky factor of the covariance.
//!
//! Streams are ChaCha20 generators seeded with [`rand::SeedableRng::seed_from_u64`]
//! and positioned with `set_stream(stream_index)`; given `(seed, stream_index)`
//! every draw is reproducible independently of scheduling.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::polya::PolyaWeight;

/// Identifier of a reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        RandomStream { seed, stream_index }
    }

    /// The ChaCha20 generator for this stream.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Sub-stream used for trial `trial` of a run whose base index is this
    /// stream's index: `stream_index · 2³² + trial`.
    pub fn trial(&self, trial: u64) -> RandomStream {
        RandomStream {
            seed: self.seed,
            stream_index: (self.stream_index << 32) | (trial & 0xffff_ffff),
        }
    }
}

/// One standard complex Gaussian (`E|g|² = 1`, `E g² = 0`).
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// GinUE matrix with i.i.d. standard complex Gaussian entries, drawn from `rng`.
pub fn ginue_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| standard_complex_normal(rng))
}

/// GinUE matrix of size `n` drawn from a fresh generator for `stream`.
///
/// # Example
/// ```
/// use winding_rmt::sampling::{sample_ginue, RandomStream};
/// let a = sample_ginue(3, RandomStream::new(7, 0)).unwrap();
/// let b = sample_ginue(3, RandomStream::new(7, 0)).unwrap();
/// assert_eq!(a, b);
/// ```
pub fn sample_ginue(n: usize, stream: RandomStream) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::domain("sample_ginue", "matrix size must be positive"));
    }
    Ok(ginue_matrix(n, &mut stream.rng()))
}

/// Proposal attempts allowed per eigenvalue before giving up.
const MAX_PROPOSALS_PER_POINT: usize = 200_000;

/// Eigenvalues of `K₁⁻¹K₂` for the `ω̂`-weighted determinantal process, drawn
/// from `rng` by sequential conditional sampling of the rank-`N` projection
/// kernel spanned by `z^k √ω̂(|z|²) / √(π M[ω̂](k+1))`, `k = 0..N−1`.
///
/// Each point is proposed from the uniform mixture of the normalised radial
/// laws `t^k ω̂(t)/M[ω̂](k+1)` with a uniform angle (this mixture is exactly the
/// one-point density `K(z,z)/N`) and accepted with probability
/// `‖P⊥ v(z)‖² / ‖v(z)‖²`, where `P⊥` projects away from the feature vectors
/// of the points already placed.
pub fn dpp_eigenvalues(weight: &dyn PolyaWeight, rng: &mut dyn RngCore) -> Result<Vec<Complex64>> {
    let n = weight.n();
    let ln_h: Vec<f64> = (0..n)
        .map(|k| Ok(PI.ln() + weight.ln_mellin(k as f64 + 1.0)?))
        .collect::<Result<_>>()?;
    // Orthonormal basis (Gram–Schmidt) of the span of the placed feature vectors.
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut feature = vec![Complex64::new(0.0, 0.0); n];
    for placed in 0..n {
        let mut accepted = false;
        for _ in 0..MAX_PROPOSALS_PER_POINT {
            let k = rng.gen_range(0..n);
            let t = weight.sample_radial(k, rng);
            let theta = rng.gen::<f64>() * TAU;
            let z = Complex64::from_polar(t.sqrt(), theta);
            // v_k = z^k √ω̂(t)/√h_k, built in log scale; the common factor
            // √ω̂(t) cancels in the acceptance ratio and is dropped.
            let lt = t.ln();
            let mut scale = f64::NEG_INFINITY;
            let mut logs = vec![0.0; n];
            for (k, l) in logs.iter_mut().enumerate() {
                *l = 0.5 * (k as f64 * lt - ln_h[k]);
                scale = scale.max(*l);
            }
            let mut norm_sq = 0.0;
            for k in 0..n {
                let mag = (logs[k] - scale).exp();
                feature[k] = Complex64::from_polar(mag, k as f64 * theta);
                norm_sq += mag * mag;
            }
            let mut residual = feature.clone();
            for e in &basis {
                let c: Complex64 = e.iter().zip(&residual).map(|(x, y)| x.conj() * y).sum();
                for (r, x) in residual.iter_mut().zip(e) {
                    *r -= c * x;
                }
            }
            let res_sq: f64 = residual.iter().map(|v| v.norm_sqr()).sum();
            let ratio = (res_sq / norm_sq).clamp(0.0, 1.0);
            if rng.gen::<f64>() < ratio {
                let nr = res_sq.sqrt();
                // Re-orthogonalise once for stability before storing.
                let mut e: Vec<Complex64> = residual.iter().map(|v| v / nr).collect();
                for b in &basis {
                    let c: Complex64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                    for (r, x) in e.iter_mut().zip(b) {
                        *r -= c * x;
                    }
                }
                let ne = e.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                basis.push(e.into_iter().map(|v| v / ne).collect());
                points.push(z);
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::Sampling(format!(
                "no proposal accepted for point {} of {n} after {MAX_PROPOSALS_PER_POINT} attempts",
                placed + 1
            )));
        }
    }
    Ok(points)
}

/// Eigenvalues of the generalised ratio for the weight `hw`, drawn from a
/// fresh generator for `stream`. See [`dpp_eigenvalues`].
pub fn sample_hat_eigenvalues(hw: &dyn PolyaWeight, stream: RandomStream) -> Result<Vec<Complex64>> {
    dpp_eigenvalues(hw, &mut stream.rng())
}

/// Lower-triangular factor `L` with `L L† = C` for the covariance Gram matrix
/// `C_{ij} = covariance(pᵢ, pⱼ)`.
///
/// # Errors
/// Validation error naming the first leading minor that is not positive.
pub fn covariance_factor(points: &[Complex64], covariance: &dyn Fn(Complex64, Complex64) -> Complex64) -> Result<ComplexMatrix> {
    let gram = ComplexMatrix::from_fn(points.len(), |i, j| covariance(points[i], points[j]));
    gram.cholesky()
}

/// Correlated field values `K(pᵢ) = Σⱼ L_{ij} Gⱼ` with i.i.d. GinUE `Gⱼ` of
/// size `n`, drawn from `rng`, for a precomputed factor `L`.
pub fn grf_matrices<R: Rng + ?Sized>(factor: &ComplexMatrix, n: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let k = factor.dim();
    let g: Vec<ComplexMatrix> = (0..k).map(|_| ginue_matrix(n, rng)).collect();
    (0..k)
        .map(|i| {
            let mut acc = ComplexMatrix::zeros(n);
            for (j, gj) in g.iter().enumerate().take(i + 1) {
                let l = factor[(i, j)];
                if l != Complex64::new(0.0, 0.0) {
                    acc = acc.combine(Complex64::new(1.0, 0.0), gj, l);
                }
            }
            acc
        })
        .collect()
}

/// Matrices `(K(p₁), …, K(p_k))` of a complex Ginibre random field with
/// covariance `E[K_{ab}(p) conj K_{ab}(q)] = C(p, q)`.
///
/// # Errors
/// Validation error with the failing minor when `C` is not positive definite
/// on the point set; domain error for `n = 0`.
pub fn sample_grf(
    points: &[Complex64],
    covariance: &dyn Fn(Complex64, Complex64) -> Complex64,
    n: usize,
    stream: RandomStream,
) -> Result<Vec<ComplexMatrix>> {
    if n == 0 {
        return Err(Error::domain("sample_grf", "matrix size must be positive"));
    }
    let factor = covariance_factor(points, covariance)?;
    Ok(grf_matrices(&factor, n, &mut stream.rng()))
}
