//! Muttalib–Borodin Pólya weights, their Mellin transforms, and the weight
//! `ω̂` of the generalised ratio `K₁⁻¹K₂` of two independent draws.

use rand::RngCore;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::numerics::{log_gamma, regularized_incomplete_beta_pair};
use crate::numerics::special::ln_gamma;

/// Parameters `(γ, δ)` of the Muttalib–Borodin weight `∝ t^δ e^{−t^γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MBParams {
    gamma: f64,
    delta: f64,
}

impl MBParams {
    /// Validated constructor (`γ > 0`, `δ > −1`).
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain("MBParams", format!("gamma = {gamma} must be positive")));
        }
        if !(delta > -1.0) || !delta.is_finite() {
            return Err(Error::domain("MBParams", format!("delta = {delta} must exceed -1")));
        }
        Ok(MBParams { gamma, delta })
    }

    /// The Ginibre point `γ = 1, δ = 0`.
    pub fn ginibre() -> Self {
        MBParams { gamma: 1.0, delta: 0.0 }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Density `ω_MB(t) = γ/Γ((δ+1)/γ) · t^δ e^{−t^γ}`, normalised to unit mass.
///
/// # Example
/// ```
/// use winding_rmt::polya::{mb_weight, MBParams};
/// let v = mb_weight(0.5, &MBParams::ginibre()).unwrap();
/// assert!((v - (-0.5f64).exp()).abs() < 1e-15);
/// ```
pub fn mb_weight(t: f64, params: &MBParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("mb_weight", format!("t = {t} must be positive")));
    }
    let (g, d) = (params.gamma, params.delta);
    Ok((g.ln() - ln_gamma((d + 1.0) / g) + d * t.ln() - t.powf(g)).exp())
}

/// Mellin transform `Γ((δ+z)/γ)/Γ((δ+1)/γ)` of [`mb_weight`].
pub fn mb_mellin(z: f64, params: &MBParams) -> Result<f64> {
    let (g, d) = (params.gamma, params.delta);
    if !(d + z > 0.0) {
        return Err(Error::domain("mb_mellin", format!("δ + z = {} must be positive", d + z)));
    }
    Ok((log_gamma((d + z) / g)? - ln_gamma((d + 1.0) / g)).exp())
}

/// Weight `ω̂` bound to a matrix size `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatWeight {
    params: MBParams,
    n: usize,
}

impl HatWeight {
    /// Validated constructor (`N ≥ 1`).
    pub fn new(params: MBParams, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("HatWeight", "matrix size must be positive"));
        }
        Ok(HatWeight { params, n })
    }

    pub fn params(&self) -> &MBParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn ln_prefactor(&self) -> f64 {
        let (g, d, n) = (self.params.gamma, self.params.delta, self.n as f64);
        g.ln() + ln_gamma((n + 2.0 * d + 1.0) / g) - ln_gamma((d + n) / g) - ln_gamma((d + 1.0) / g)
    }

    /// `ln ω̂(t)` for `t > 0`.
    pub fn ln_density(&self, t: f64) -> f64 {
        let (g, d, n) = (self.params.gamma, self.params.delta, self.n as f64);
        let lt = t.ln();
        // ln(1 + t^γ) evaluated without overflow for large t.
        let gl = g * lt;
        let log1p_tg = if gl > 0.0 { gl + (-gl).exp().ln_1p() } else { gl.exp().ln_1p() };
        self.ln_prefactor() + d * lt - (n + 2.0 * d + 1.0) / g * log1p_tg
    }

    /// `ln M[ω̂](z)` inside the strip `−δ < z < N + δ + 1`.
    pub fn ln_mellin(&self, z: f64) -> Result<f64> {
        let (g, d, n) = (self.params.gamma, self.params.delta, self.n as f64);
        if !(z > -d) || !(z < n + d + 1.0) {
            return Err(Error::domain(
                "hat_mellin",
                format!("z = {z} outside the strip ({}, {})", -d, n + d + 1.0),
            ));
        }
        Ok(ln_gamma((d + z) / g) + ln_gamma((n + d + 1.0 - z) / g) - ln_gamma((d + 1.0) / g) - ln_gamma((n + d) / g))
    }

    /// Draws `t = |z|²` from the density `t^k ω̂(t)/M[ω̂](k+1)` (`0 ≤ k < N`).
    ///
    /// With `s = t^γ` and `u = s/(1+s)`, `u` is Beta((δ+k+1)/γ, (N+δ−k)/γ).
    pub fn sample_radial(&self, k: usize, rng: &mut dyn RngCore) -> f64 {
        let (g, d, n) = (self.params.gamma, self.params.delta, self.n as f64);
        let a = (d + k as f64 + 1.0) / g;
        let b = (n + d - k as f64) / g;
        let beta = Beta::new(a, b).expect("shape parameters are positive for 0 <= k < N");
        let u: f64 = beta.sample(rng);
        let u = u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
        (u / (1.0 - u)).powf(1.0 / g)
    }
}

/// `ω̂(t) = γΓ((N+2δ+1)/γ)/(Γ((δ+N)/γ)Γ((δ+1)/γ)) · t^δ (1+t^γ)^{−(N+2δ+1)/γ}`.
///
/// # Example
/// ```
/// use winding_rmt::polya::{hat_weight, HatWeight, MBParams};
/// let hw = HatWeight::new(MBParams::ginibre(), 1).unwrap();
/// assert!((hat_weight(2.0, &hw).unwrap() - 1.0 / 9.0).abs() < 1e-15);
/// ```
pub fn hat_weight(t: f64, hw: &HatWeight) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("hat_weight", format!("t = {t} must be positive")));
    }
    Ok(hw.ln_density(t).exp())
}

/// `M[ω̂](z) = Γ((δ+z)/γ)Γ((N+δ+1−z)/γ)/(Γ((δ+1)/γ)Γ((N+δ)/γ))`.
pub fn hat_mellin(z: f64, hw: &HatWeight) -> Result<f64> {
    hw.ln_mellin(z).map(f64::exp)
}

/// Ratio `M[ω̂](k, A)/M[ω̂](k)` of the incomplete to the complete Mellin
/// transform at integer `k`, with `A` the upper integration limit in `t`.
///
/// Evaluated in closed form as `I_x((δ+k)/γ, (N+δ+1−k)/γ)` with
/// `x = A^γ/(1+A^γ)`.
///
/// # Example
/// ```
/// use winding_rmt::polya::{hat_mellin_ratio, HatWeight, MBParams};
/// let hw = HatWeight::new(MBParams::ginibre(), 1).unwrap();
/// assert!((hat_mellin_ratio(1, 3.0, &hw).unwrap() - 0.75).abs() < 1e-15);
/// ```
pub fn hat_mellin_ratio(k: usize, a_upper: f64, hw: &HatWeight) -> Result<f64> {
    if k == 0 || k > hw.n {
        return Err(Error::domain("hat_mellin_ratio", format!("k = {k} outside [1, {}]", hw.n)));
    }
    if !(a_upper >= 0.0) {
        return Err(Error::domain("hat_mellin_ratio", format!("upper limit {a_upper} is negative")));
    }
    let (g, d, n) = (hw.params.gamma, hw.params.delta, hw.n as f64);
    let (x, y) = if a_upper == 0.0 {
        (0.0, 1.0)
    } else if a_upper.is_infinite() {
        (1.0, 0.0)
    } else {
        let ls = g * a_upper.ln();
        if ls > 0.0 {
            let r = (-ls).exp();
            (1.0 / (1.0 + r), r / (1.0 + r))
        } else {
            let s = ls.exp();
            (s / (1.0 + s), 1.0 / (1.0 + s))
        }
    };
    regularized_incomplete_beta_pair(x, y, (d + k as f64) / g, (n + d + 1.0 - k as f64) / g)
}

/// The ratio of [`hat_mellin_ratio`] together with its complement
/// `1 − ratio`, each computed to full relative accuracy.
pub(crate) fn hat_mellin_ratio_pair(k: usize, a_upper: f64, hw: &HatWeight) -> Result<(f64, f64)> {
    let r = hat_mellin_ratio(k, a_upper, hw)?;
    // The complement is the same ratio for the reflected index at 1/A.
    let c = if a_upper == 0.0 {
        1.0
    } else {
        hat_mellin_ratio(hw.n + 1 - k, 1.0 / a_upper, hw)?
    };
    Ok((r, c))
}

/// `Σ_{k=1}^{N} M[ω̂](k, s)/M[ω̂](k)`, i.e. `Υ_N(u, u)` for `|u|² = s`.
pub(crate) fn ratio_sum(s: f64, hw: &HatWeight) -> Result<f64> {
    let mut acc = 0.0;
    for k in 1..=hw.n {
        acc += hat_mellin_ratio(k, s, hw)?;
    }
    Ok(acc)
}

/// Interface shared by Pólya weights of generalised-ratio ensembles.
///
/// Only the Muttalib–Borodin family is provided; the partition-function,
/// sampling and winding modules are written against this trait.
pub trait PolyaWeight: Send + Sync {
    /// Registry name of the weight family.
    fn name(&self) -> &'static str;
    /// Matrix size the weight is bound to.
    fn n(&self) -> usize;
    /// Named real parameters (for reporting).
    fn params(&self) -> Vec<(&'static str, f64)>;
    /// Density value at `t > 0`.
    fn evaluate(&self, t: f64) -> Result<f64>;
    /// Natural log of the density at `t > 0`.
    fn ln_evaluate(&self, t: f64) -> f64;
    /// Mellin transform at real `z`.
    fn mellin(&self, z: f64) -> Result<f64> {
        self.ln_mellin(z).map(f64::exp)
    }
    /// Natural log of the Mellin transform at real `z`.
    fn ln_mellin(&self, z: f64) -> Result<f64>;
    /// Incomplete-to-complete Mellin ratio at integer `k` with upper limit `a_upper`.
    fn incomplete_mellin_ratio(&self, k: usize, a_upper: f64) -> Result<f64>;
    /// Draws `t` from `t^k ω(t)/M(k+1)` for `0 ≤ k < N`.
    fn sample_radial(&self, k: usize, rng: &mut dyn RngCore) -> f64;
    /// Exponent `δ` governing the behaviour `ω(t) ~ t^δ` at the origin.
    fn origin_exponent(&self) -> f64;
}

impl PolyaWeight for HatWeight {
    fn name(&self) -> &'static str {
        "mb"
    }
    fn n(&self) -> usize {
        self.n
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("gamma", self.params.gamma), ("delta", self.params.delta), ("n", self.n as f64)]
    }
    fn evaluate(&self, t: f64) -> Result<f64> {
        hat_weight(t, self)
    }
    fn ln_evaluate(&self, t: f64) -> f64 {
        self.ln_density(t)
    }
    fn ln_mellin(&self, z: f64) -> Result<f64> {
        HatWeight::ln_mellin(self, z)
    }
    fn incomplete_mellin_ratio(&self, k: usize, a_upper: f64) -> Result<f64> {
        hat_mellin_ratio(k, a_upper, self)
    }
    fn sample_radial(&self, k: usize, rng: &mut dyn RngCore) -> f64 {
        HatWeight::sample_radial(self, k, rng)
    }
    fn origin_exponent(&self) -> f64 {
        self.params.delta
    }
}

/// Largest second divided difference of `x ↦ ln(e^{−x} ω(e^{−x}))` on a
/// uniform grid; non-positive values (up to rounding) certify log-concavity of
/// the logarithmic deformation.
pub fn log_concavity_defect(params: &MBParams, x_min: f64, x_max: f64, points: usize) -> Result<f64> {
    if points < 3 || !(x_max > x_min) {
        return Err(Error::domain("log_concavity_defect", "need at least three grid points"));
    }
    let h = (x_max - x_min) / (points - 1) as f64;
    let f = |x: f64| -> Result<f64> { Ok(-x + mb_weight((-x).exp(), params)?.ln()) };
    let mut worst = f64::NEG_INFINITY;
    for i in 1..points - 1 {
        let x = x_min + i as f64 * h;
        let dd = (f(x - h)? - 2.0 * f(x)? + f(x + h)?) / (h * h);
        worst = worst.max(dd);
    }
    Ok(worst)
}
