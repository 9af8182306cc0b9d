//! Large-`N` expansion of the mean winding number for Muttalib–Borodin source
//! matrices and the ingredients of its derivation: the Aharonov–Anandan phase
//! of `ν_γ`, the principal-value correction, the exact and asymptotic
//! normalised ratio sum `Ξ_N`, the Laplace-type representation `φ_N` and its
//! erfc edge approximation.
//!
//! Sign conventions: the subleading coefficient implemented here is
//! `(2δ+1−γ)/2`, and the odd edge coefficients are
//! `C₁,₁ = −(2δ+1)(1−2τ)/(2√γ)`, `C₁,₃ = √γ(1−2τ)/6`. Both follow from a direct
//! evaluation of the exact ratio sums at large `N` (see the unit tests, which
//! check the expansion against the exact finite-`N` quantities).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::curves::CurvePair;
use crate::error::{Error, Result};
use crate::numerics::{adaptive_integral, circle_integral, circle_integral_graded, circle_integral_pv, erfc, QuadratureSpec, Upper};
use crate::partition::mean_winding_exact;
use crate::polya::{ratio_sum, HatWeight, MBParams};

/// Two-term decomposition of the large-`N` mean winding number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticBreakdown {
    /// Aharonov–Anandan phase of `ν_γ`; multiplies `N`.
    pub leading_coefficient: f64,
    /// `N`-independent correction.
    pub subleading_value: f64,
    pub n: usize,
    /// `leading_coefficient · N + subleading_value`.
    pub assembled: f64,
}

/// Weights `(|a|^{2γ}, |b|^{2γ}) / (|a|^{2γ} + |b|^{2γ})` evaluated without
/// overflow.
fn gamma_weights(a: Complex64, b: Complex64, gamma: f64) -> (f64, f64) {
    let (ma, mb) = (a.norm(), b.norm());
    let s = ma.max(mb);
    let wa = (ma / s).powf(2.0 * gamma);
    let wb = (mb / s).powf(2.0 * gamma);
    (wa / (wa + wb), wb / (wa + wb))
}

/// `w · f'/f`, taken as zero where `f` vanishes (the limit when `2γ > 1`).
fn weighted_log_derivative(w: f64, f: Complex64, df: Complex64) -> Complex64 {
    if w == 0.0 || f == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        df / f * w
    }
}

/// Integrand `ν_γ†ν_γ′/‖ν_γ‖²` of the Aharonov–Anandan phase at `p`.
pub fn aa_density(curve: &CurvePair, p: Complex64, gamma: f64) -> Complex64 {
    let [a, b] = curve.nu(p);
    let [da, db] = curve.nu_prime(p);
    let (wa, wb) = gamma_weights(a, b, gamma);
    weighted_log_derivative(wa, a, da) + weighted_log_derivative(wb, b, db)
}

/// Integrand of the subleading correction at `p` (without the PV prescription),
/// including the prefactor `(2δ+1−γ)/2`.
pub fn subleading_density(curve: &CurvePair, p: Complex64, gamma: f64, delta: f64) -> Complex64 {
    let [a, b] = curve.nu(p);
    let [da, db] = curve.nu_prime(p);
    let (wa, wb) = gamma_weights(a, b, gamma);
    (da / a - db / b) * (wa - wb) * (0.5 * (2.0 * delta + 1.0 - gamma))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain("asymptotics", format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

fn real_part(op: &'static str, v: Complex64, tol: f64) -> Result<f64> {
    if v.im.abs() > tol * v.re.abs().max(1.0) {
        return Err(Error::Accuracy {
            op,
            estimate: v.re,
            error_bound: v.im.abs(),
        });
    }
    Ok(v.re)
}

/// Aharonov–Anandan phase `(1/2πi)∮ ν_γ†ν_γ′/‖ν_γ‖² dp` of the deformed frame
/// `ν_γ = (|a|^{γ−1}a, |b|^{γ−1}b)ᵀ`.
///
/// Curves with zeros on the circle are integrated with a rule graded towards
/// the zeros (the integrand is only Hölder continuous there).
///
/// # Errors
/// Accuracy error when the imaginary residue exceeds `1e-9`.
///
/// # Example
/// ```
/// use winding_rmt::asymptotics::aa_phase;
/// use winding_rmt::curves::monomial_curve;
/// use winding_rmt::numerics::QuadratureSpec;
/// let c = monomial_curve(1.0, 1, 1.0, 0).unwrap();
/// assert!((aa_phase(&c, 1.0, &QuadratureSpec::default()).unwrap() - 0.5).abs() < 1e-13);
/// ```
pub fn aa_phase(curve: &CurvePair, gamma: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_gamma(gamma)?;
    let zeros = curve.all_zeros();
    let f = |p| aa_density(curve, p, gamma);
    let v = if zeros.is_empty() {
        circle_integral(f, spec)?
    } else {
        circle_integral_graded(f, &zeros, spec)?
    };
    real_part("aa_phase", v, 1e-9)
}

/// Principal value `(1/2πi) PV∮ f′/f dp`: zeros inside the disk minus poles
/// at the origin, with zeros on the circle counted one half.
fn pv_log_derivative_index(curve: &CurvePair, which_a: bool, spec: &QuadratureSpec) -> Result<f64> {
    let (poly, zeros) = if which_a {
        (&curve.a, &curve.zeros_a)
    } else {
        (&curve.b, &curve.zeros_b)
    };
    let v = circle_integral_pv(|p| poly.eval(p, 1) / poly.eval(p, 0), zeros, spec)?;
    real_part("subleading_term", v, 1e-9)
}

/// Subleading correction
/// `((2δ+1−γ)/2) (1/2πi) PV∮ (κ′/κ)(|a|^{2γ}−|b|^{2γ})/(|a|^{2γ}+|b|^{2γ}) dp`.
///
/// Writing the weight as `2|a|^{2γ}/(…) − 1 = 1 − 2|b|^{2γ}/(…)` splits the
/// integrand into `2 ν_γ†ν_γ′/‖ν_γ‖²` (no poles) minus the pure logarithmic
/// derivatives `a′/a + b′/b`, whose principal values are taken on symmetric
/// pole-centred grids. At `(γ, δ) = (1, 0)` the prefactor vanishes and the
/// result is exactly zero.
///
/// # Errors
/// Accuracy error on a residual imaginary part; domain error for `γ ≤ 0`.
pub fn subleading_term(curve: &CurvePair, gamma: f64, delta: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_gamma(gamma)?;
    let prefactor = 0.5 * (2.0 * delta + 1.0 - gamma);
    if prefactor == 0.0 {
        return Ok(0.0);
    }
    let aa = aa_phase(curve, gamma, spec)?;
    let ia = pv_log_derivative_index(curve, true, spec)?;
    let ib = pv_log_derivative_index(curve, false, spec)?;
    Ok(prefactor * (2.0 * aa - ia - ib))
}

/// Two-term large-`N` mean winding number for Muttalib–Borodin sources.
///
/// # Example
/// ```
/// use winding_rmt::asymptotics::theorem2_mean;
/// use winding_rmt::curves::monomial_curve;
/// use winding_rmt::numerics::QuadratureSpec;
/// let c = monomial_curve(1.0, 2, 1.0, -1).unwrap();
/// let t = theorem2_mean(&c, 2.0, 0.5, 7, &QuadratureSpec::default()).unwrap();
/// assert!((t.assembled - 3.5).abs() < 1e-12);
/// ```
pub fn theorem2_mean(curve: &CurvePair, gamma: f64, delta: f64, n: usize, spec: &QuadratureSpec) -> Result<AsymptoticBreakdown> {
    MBParams::new(gamma, delta)?;
    if n == 0 {
        return Err(Error::domain("theorem2_mean", "N must be positive"));
    }
    let leading = aa_phase(curve, gamma, spec)?;
    let sub = subleading_term(curve, gamma, delta, spec)?;
    Ok(AsymptoticBreakdown {
        leading_coefficient: leading,
        subleading_value: sub,
        n,
        assembled: leading * n as f64 + sub,
    })
}

/// Exact `Ξ_N(A) = (1/N) Σ_{k=1}^N M[ω̂](k, A)/M[ω̂](k)`, so that
/// `N·Ξ_N(|u|²) = Υ_N(u, u)`.
///
/// # Errors
/// Domain error for `A ≤ 0`.
pub fn xi_exact(a_modulus_sq: f64, hw: &HatWeight) -> Result<f64> {
    if !(a_modulus_sq > 0.0) {
        return Err(Error::domain("xi_exact", format!("A must be positive, got {a_modulus_sq}")));
    }
    Ok(ratio_sum(a_modulus_sq, hw)? / hw.n() as f64)
}

/// `τ₀ = A^γ/(1 + A^γ)`.
pub fn tau0(a_modulus_sq: f64, gamma: f64) -> f64 {
    1.0 / (1.0 + (-gamma * a_modulus_sq.ln()).exp())
}

/// Two-term asymptotic form `τ₀ + (1/N)((2δ+1−γ)/2)(A^γ−1)/(A^γ+1)` of `Ξ_N(A)`.
pub fn xi_asymptotic(a_modulus_sq: f64, n: usize, gamma: f64, delta: f64) -> f64 {
    let t0 = tau0(a_modulus_sq, gamma);
    let odd = (0.5 * gamma * a_modulus_sq.ln()).tanh();
    t0 + 0.5 * (2.0 * delta + 1.0 - gamma) * odd / n as f64
}

/// `F_τ(x) = ln(1+eˣ) − τx`.
fn f_tau(x: f64, tau: f64) -> f64 {
    let softplus = if x > 0.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() };
    softplus - tau * x
}

/// `ln h(x) = −((2δ+1)/γ) ln(2 cosh(x/2))`.
fn ln_h(x: f64, gamma: f64, delta: f64) -> f64 {
    let ax = x.abs();
    -(2.0 * delta + 1.0) / gamma * (0.5 * ax + (-ax).exp().ln_1p())
}

/// Critical point `x_*(τ) = ln(τ/(1−τ))` of `F_τ`.
pub fn critical_point(tau: f64) -> f64 {
    (tau / (1.0 - tau)).ln()
}

/// Integrals of `h(x) e^{−N F_τ(x)/γ}` over `(−∞, upper]` and `ℝ`, both scaled
/// by `e^{−g*}` where `g*` is the log-integrand at `x_*(τ)`; returns
/// `(numerator, denominator, g*)`.
fn laplace_integrals(tau: f64, upper: f64, n: usize, gamma: f64, delta: f64, tol: f64) -> Result<(f64, f64, f64)> {
    let nn = n as f64;
    let g = |x: f64| ln_h(x, gamma, delta) - nn * f_tau(x, tau) / gamma;
    let xs = critical_point(tau);
    let gs = g(xs);
    let right = |x: f64| (g(x) - gs).exp();
    let left = |y: f64| (g(-y) - gs).exp();
    let below = adaptive_integral(left, -xs, Upper::Infinity, tol)?;
    let above = adaptive_integral(right, xs, Upper::Infinity, tol)?;
    let den = below + above;
    let num = if upper == f64::INFINITY {
        den
    } else if upper <= xs {
        adaptive_integral(left, -upper, Upper::Infinity, tol)?
    } else {
        den - adaptive_integral(right, upper, Upper::Infinity, tol)?
    };
    Ok((num, den, gs))
}

fn check_phi_args(k: usize, a_upper: f64, n: usize, gamma: f64, delta: f64) -> Result<()> {
    MBParams::new(gamma, delta)?;
    if k == 0 || k > n {
        return Err(Error::domain("phi", format!("k must lie in 1..={n}, got {k}")));
    }
    if !(a_upper > 0.0) {
        return Err(Error::domain("phi", format!("A must be positive, got {a_upper}")));
    }
    Ok(())
}

/// `φ_N(τ, A)` at `τ = (2k−1)/(2N)` from its Laplace-type integral
/// representation, by adaptive quadrature in the variable `x = γ ln t`.
///
/// Independent of the incomplete-beta route used by
/// [`hat_mellin_ratio`](crate::polya::hat_mellin_ratio), and intended as its
/// oracle. `tol` is the absolute quadrature tolerance relative to the peak of
/// the integrand.
///
/// # Errors
/// Domain error for `k ∉ 1..=N` or `A ≤ 0`; accuracy error when the adaptive
/// rule fails.
pub fn phi_quadrature_oracle(k: usize, a_upper: f64, n: usize, gamma: f64, delta: f64, tol: f64) -> Result<f64> {
    check_phi_args(k, a_upper, n, gamma, delta)?;
    let tau = (2 * k - 1) as f64 / (2 * n) as f64;
    let (num, den, _) = laplace_integrals(tau, gamma * a_upper.ln(), n, gamma, delta, tol)?;
    Ok((num / den).clamp(0.0, 1.0))
}

/// The full denominator `∫ h(x) e^{−N F_τ(x)/γ} dx` by adaptive quadrature.
pub fn denominator_quadrature(tau: f64, n: usize, gamma: f64, delta: f64, tol: f64) -> Result<f64> {
    check_tau(tau)?;
    MBParams::new(gamma, delta)?;
    let (_, den, gs) = laplace_integrals(tau, f64::INFINITY, n, gamma, delta, tol)?;
    Ok(den * gs.exp())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain("laplace", format!("tau must lie in (0, 1), got {tau}")));
    }
    Ok(())
}

/// `χ(τ, δ, γ)` of the Laplace denominator expansion.
pub fn chi(tau: f64, delta: f64, gamma: f64) -> f64 {
    let s = (1.0 - tau) * tau;
    let d = 1.0 - 2.0 * tau;
    12.0 * (1.0 + delta) * delta * d * d + 2.0 * (12.0 * delta * gamma + 6.0 * gamma - gamma * gamma - 6.0) * s + 3.0
        + 2.0 * gamma * gamma
        - 6.0 * gamma
        - 12.0 * delta * gamma
}

/// Laplace expansion of the denominator of `φ_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceExpansion {
    /// `leading · correction_factor`.
    pub value: f64,
    /// `√(2πγ/N) [τ(1−τ)]^{(2δ+1−γ)/(2γ)} e^{−N F_τ(x_*)/γ}`.
    pub leading: f64,
    /// `1 + χ/(24 N γ τ(1−τ))`.
    pub correction_factor: f64,
}

/// Two-term Laplace expansion of `∫ h(x) e^{−N F_τ(x)/γ} dx`.
///
/// The exponential factor carries the same `1/γ` as the integrand.
///
/// # Errors
/// Domain error for `τ ∉ (0, 1)` or invalid `(γ, δ)`.
pub fn laplace_denominator_expansion(tau: f64, n: usize, gamma: f64, delta: f64) -> Result<LaplaceExpansion> {
    check_tau(tau)?;
    MBParams::new(gamma, delta)?;
    let nn = n as f64;
    let s = tau * (1.0 - tau);
    let xs = critical_point(tau);
    let leading = (2.0 * PI * gamma / nn).sqrt()
        * s.powf((2.0 * delta + 1.0 - gamma) / (2.0 * gamma))
        * (-nn * f_tau(xs, tau) / gamma).exp();
    let correction_factor = 1.0 + chi(tau, delta, gamma) / (24.0 * nn * gamma * s);
    Ok(LaplaceExpansion {
        value: leading * correction_factor,
        leading,
        correction_factor,
    })
}

/// Coefficients of the edge expansion of `φ_N` at `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCoefficients {
    pub c11: f64,
    pub c13: f64,
    pub c22: f64,
    pub c24: f64,
    pub c26: f64,
    pub chi: f64,
}

impl EdgeCoefficients {
    pub fn new(tau: f64, gamma: f64, delta: f64) -> Self {
        let d = 1.0 - 2.0 * tau;
        let s = (1.0 - tau) * tau;
        let e = 2.0 * delta + 1.0;
        let sg = gamma.sqrt();
        EdgeCoefficients {
            c11: -e * d / (2.0 * sg),
            c13: sg * d / 6.0,
            c22: e * (1.0 + 2.0 * delta * d * d - 4.0 * (1.0 + gamma) * s) / (8.0 * gamma),
            c24: (6.0 * gamma * s - gamma - 2.0 * e * d * d) / 24.0,
            c26: gamma * d * d / 72.0,
            chi: chi(tau, delta, gamma),
        }
    }

    /// `C₂,₂ + 3C₂,₄ + 15C₂,₆ − χ/(24γ)`, zero up to rounding.
    pub fn identity_defect(&self, gamma: f64) -> f64 {
        self.c22 + 3.0 * self.c24 + 15.0 * self.c26 - self.chi / (24.0 * gamma)
    }
}

/// erfc edge approximation of `φ_N(τ, A)` at `τ = (2k−1)/(2N)` with
/// coefficients evaluated at `τ₀ = A^γ/(1+A^γ)`.
///
/// # Errors
/// Domain error for `k ∉ 1..=N`, `A ≤ 0` or invalid `(γ, δ)`.
pub fn phi_edge_approx(k: usize, a_upper: f64, n: usize, gamma: f64, delta: f64) -> Result<f64> {
    check_phi_args(k, a_upper, n, gamma, delta)?;
    let nn = n as f64;
    let tau = (2 * k - 1) as f64 / (2.0 * nn);
    let t0 = tau0(a_upper, gamma);
    let s0 = t0 * (1.0 - t0);
    let c = EdgeCoefficients::new(t0, gamma, delta);
    let dt = tau - t0;
    let q = nn * dt * dt / (gamma * s0);
    Ok(0.5 * erfc((nn / (2.0 * gamma * s0)).sqrt() * dt)
        + (c.c11 + c.c13 * (q + 2.0)) * (-0.5 * q).exp() / (2.0 * PI * nn * s0).sqrt())
}

/// Indices `k` of the central window `|τ − τ₀| ≤ width·√(γτ₀(1−τ₀)/N)`.
pub fn central_window(a_upper: f64, n: usize, gamma: f64, width: f64) -> Vec<usize> {
    let nn = n as f64;
    let t0 = tau0(a_upper, gamma);
    let half = width * (gamma * t0 * (1.0 - t0) / nn).sqrt();
    (1..=n)
        .filter(|&k| (((2 * k - 1) as f64 / (2.0 * nn)) - t0).abs() <= half)
        .collect()
}

/// Leading and subleading parts of the large-`N` one-point function at `p`:
/// `(N ν_γ†ν_γ′/‖ν_γ‖², subleading density)`.
pub fn c1_asymptotic(curve: &CurvePair, p: Complex64, gamma: f64, delta: f64, n: usize) -> (Complex64, Complex64) {
    (aa_density(curve, p, gamma) * n as f64, subleading_density(curve, p, gamma, delta))
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub exact: f64,
    pub asymptotic: f64,
    pub gap: f64,
}

/// Exact mean winding against the two-term expansion for each `N` in `ns`.
///
/// # Errors
/// Propagated from [`mean_winding_exact`] and [`theorem2_mean`].
pub fn convergence_study(curve: &CurvePair, params: &MBParams, ns: &[usize], spec: &QuadratureSpec) -> Result<Vec<ConvergenceRow>> {
    let leading = aa_phase(curve, params.gamma(), spec)?;
    let sub = subleading_term(curve, params.gamma(), params.delta(), spec)?;
    ns.iter()
        .map(|&n| {
            let hw = HatWeight::new(*params, n)?;
            let exact = mean_winding_exact(curve, &hw, spec)?;
            let asymptotic = leading * n as f64 + sub;
            Ok(ConvergenceRow {
                n,
                exact,
                asymptotic,
                gap: (exact - asymptotic).abs(),
            })
        })
        .collect()
}
