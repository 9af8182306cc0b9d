//! Exact finite-`N` partition functions, the auxiliary sum `Υ_N`, the analytic
//! kernels behind the block-determinant formula, and the exact 1-point
//! winding density.
//!
//! All formulas use the factorisation `det K(p) = det K₁ · Π_j (a(p) + b(p) z_j)`
//! with `z_j` the eigenvalues of `K₁⁻¹K₂`, whose joint law is the
//! determinantal process with weight `ω̂(|z|²)`. Writing `x = −κ(p)` and
//! `y = −κ(q)`, a single ratio has the expectation
//! `E[Π_j (z_j − x)/(z_j − y)] = 1 − (y − x) Σ_{k=1}^{N} r_k(|y|²) x^{k−1}/y^k`
//! with `r_k` the incomplete-to-complete Mellin ratio of `ω̂`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::curves::{curve_frame, CurvePair};
use crate::error::{Error, Result};
use crate::numerics::{
    adaptive_integral_complex, circle_integral, circle_integral_graded, ComplexMatrix, LogDet, QuadratureSpec, Upper,
};
use crate::polya::{hat_mellin_ratio, hat_mellin_ratio_pair, ratio_sum, HatWeight, PolyaWeight};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Relative margin below which two points count as projectively coincident.
const COINCIDENCE_MARGIN: f64 = 1e-12;

/// Point collections `p, q` (numerator/denominator) and the conjugated
/// collections `p̃, q̃` of a partition function.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPairs {
    p: Vec<Complex64>,
    q: Vec<Complex64>,
    p_tilde: Vec<Complex64>,
    q_tilde: Vec<Complex64>,
}

fn check_unit(label: &str, pts: &[Complex64]) -> Result<()> {
    for (i, z) in pts.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("{label}[{i}] = {z} is not on the unit circle")));
        }
    }
    Ok(())
}

impl PointPairs {
    /// Validated constructor: all points unit-modulus, `|p| = |q|`, `|p̃| = |q̃|`.
    pub fn new(
        p: Vec<Complex64>,
        q: Vec<Complex64>,
        p_tilde: Vec<Complex64>,
        q_tilde: Vec<Complex64>,
    ) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::Validation(format!(
                "p has {} points but q has {}",
                p.len(),
                q.len()
            )));
        }
        if p_tilde.len() != q_tilde.len() {
            return Err(Error::Validation(format!(
                "p_tilde has {} points but q_tilde has {}",
                p_tilde.len(),
                q_tilde.len()
            )));
        }
        check_unit("p", &p)?;
        check_unit("q", &q)?;
        check_unit("p_tilde", &p_tilde)?;
        check_unit("q_tilde", &q_tilde)?;
        Ok(PointPairs { p, q, p_tilde, q_tilde })
    }

    /// Pairs without conjugated factors (`m₂ = 0`).
    pub fn simple(p: Vec<Complex64>, q: Vec<Complex64>) -> Result<Self> {
        Self::new(p, q, Vec::new(), Vec::new())
    }

    /// Points given as angles in turns (fractions of `2π`).
    pub fn from_turns(p: &[f64], q: &[f64], p_tilde: &[f64], q_tilde: &[f64]) -> Result<Self> {
        let conv = |v: &[f64]| v.iter().map(|t| Complex64::from_polar(1.0, 2.0 * PI * t)).collect();
        Self::new(conv(p), conv(q), conv(p_tilde), conv(q_tilde))
    }

    pub fn p(&self) -> &[Complex64] {
        &self.p
    }
    pub fn q(&self) -> &[Complex64] {
        &self.q
    }
    pub fn p_tilde(&self) -> &[Complex64] {
        &self.p_tilde
    }
    pub fn q_tilde(&self) -> &[Complex64] {
        &self.q_tilde
    }
    pub fn m1(&self) -> usize {
        self.p.len()
    }
    pub fn m2(&self) -> usize {
        self.p_tilde.len()
    }

    /// Checks that the denominator points (and separately the numerator
    /// points) of each collection are pairwise projectively distinct on the
    /// curve: `a(qᵢ)b(qⱼ) ≠ a(qⱼ)b(qᵢ)` to a relative margin of `1e-12`.
    pub fn check_separation(&self, curve: &CurvePair) -> Result<()> {
        for (label, pts) in [("q", &self.q), ("p", &self.p), ("q_tilde", &self.q_tilde), ("p_tilde", &self.p_tilde)] {
            let nus: Vec<[Complex64; 2]> = pts.iter().map(|&z| curve.nu(z)).collect();
            for i in 0..nus.len() {
                for j in i + 1..nus.len() {
                    if projectively_equal(&nus[i], &nus[j]) {
                        return Err(Error::Degenerate {
                            i,
                            j,
                            detail: format!("{label} points are projectively coincident on the curve"),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Value of a partition function with log-magnitude bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionResult {
    /// The partition function (may overflow to infinity where `log_abs` does not).
    pub value: Complex64,
    /// `ln |value|`.
    pub log_abs: f64,
    /// `value / |value|` (1 for a zero value).
    pub phase: Complex64,
    /// Largest of the infinity-norm condition numbers of the equilibrated
    /// matrices involved and the condition numbers of the single-ratio entries.
    pub condition_estimate: f64,
}

impl PartitionResult {
    fn from_log(log: Complex64, condition_estimate: f64) -> Self {
        let phase = Complex64::from_polar(1.0, log.im);
        PartitionResult {
            value: if log.re == f64::NEG_INFINITY { ZERO } else { phase * log.re.exp() },
            log_abs: log.re,
            phase,
            condition_estimate,
        }
    }
}

fn norm2(nu: &[Complex64; 2]) -> f64 {
    nu[0].norm_sqr() + nu[1].norm_sqr()
}

fn symplectic(u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
    u[0] * v[1] - u[1] * v[0]
}

fn projectively_equal(u: &[Complex64; 2], v: &[Complex64; 2]) -> bool {
    symplectic(u, v).norm() <= COINCIDENCE_MARGIN * (norm2(u) * norm2(v)).sqrt()
}

/// Complex natural logarithm that maps zero to `−∞`.
fn cln(z: Complex64) -> Complex64 {
    if z == ZERO {
        Complex64::new(f64::NEG_INFINITY, 0.0)
    } else {
        z.ln()
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Default)]
struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, v: Complex64) {
        let two_sum = |s: f64, x: f64, c: &mut f64| -> f64 {
            let t = s + x;
            if s.abs() >= x.abs() {
                *c += (s - t) + x;
            } else {
                *c += (x - t) + s;
            }
            t
        };
        self.sum.re = two_sum(self.sum.re, v.re, &mut self.carry.re);
        self.sum.im = two_sum(self.sum.im, v.im, &mut self.carry.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

/// `Υ_N(u, v) = Σ_{k=1}^{N} [M[ω̂](k, |v|²)/M[ω̂](k)] (u/v)^k`.
///
/// Powers are formed through the complex logarithm and the terms are summed
/// with compensation.
///
/// # Errors
/// Domain error when `v = 0` (the role-swapped representation must be used).
///
/// # Example
/// ```
/// use num_complex::Complex64;
/// use winding_rmt::partition::upsilon;
/// use winding_rmt::polya::{HatWeight, MBParams};
/// let hw = HatWeight::new(MBParams::ginibre(), 6).unwrap();
/// let u = Complex64::from_polar(1.0, 0.7);
/// assert!((upsilon(u, u, &hw).unwrap() - 3.0).norm() < 1e-12);
/// ```
pub fn upsilon(u: Complex64, v: Complex64, hw: &HatWeight) -> Result<Complex64> {
    if v == ZERO {
        return Err(Error::domain("upsilon", "second argument must be nonzero"));
    }
    if u == ZERO {
        return Ok(ZERO);
    }
    let s = v.norm_sqr();
    let lr = u.ln() - v.ln();
    let mut acc = CompensatedSum::default();
    for k in 1..=hw.n() {
        let r = hat_mellin_ratio(k, s, hw)?;
        if r > 0.0 {
            acc.add((lr * k as f64 + r.ln()).exp());
        }
    }
    Ok(acc.value())
}

/// Mellin ratios `r_k(|y|²)` and complements for `k = 1..=N`.
fn ratio_table(y: Complex64, hw: &HatWeight) -> Result<Vec<(f64, f64)>> {
    let s = y.norm_sqr();
    (1..=hw.n()).map(|k| hat_mellin_ratio_pair(k, s, hw)).collect()
}

/// Whether `r_k(|y|²)/y^k → 0` as `y → 0` (true iff `2δ + 1 > 0`).
fn origin_limit_vanishes(hw: &HatWeight) -> bool {
    2.0 * hw.origin_exponent() + 1.0 > 0.0
}

fn origin_error() -> Error {
    Error::Continuation("a denominator point sits on a zero of κ and the weight is too singular at the origin".into())
}

/// `E[Π_j (z_j − x)/(z_j − y)]` for the `ω̂` eigenvalue process.
///
/// The defining series `1 − (y−x) Σ_k r_k x^{k−1}/y^k` is summed by parts into
/// `Σ_{j=0}^{N} d_j (x/y)^j` with `d_j = r_j − r_{j+1} ≥ 0` (`r_0 = 1`,
/// `r_{N+1} = 0`): a probability generating function whose coefficients are
/// each formed from whichever of `r` or `1 − r` is small, so no O(1) terms
/// cancel. (For `γ = 1`, `δ = 0` it is `(1 − τ + τx/y)^N`.)
///
/// At `γ = 1`, `δ = 0` the coefficients are binomial and the factored form is
/// used: near its N-fold root the coefficient sum has condition numbers beyond
/// `10⁷`, which the product form avoids.
///
/// Returns the value with the condition number of its evaluation.
fn single_ratio(x: Complex64, y: Complex64, table: &[(f64, f64)], hw: &HatWeight) -> Result<(Complex64, f64)> {
    if x == y {
        return Ok((ONE, 1.0));
    }
    if y == ZERO {
        return if origin_limit_vanishes(hw) { Ok((ONE, 1.0)) } else { Err(origin_error()) };
    }
    let params = hw.params();
    if params.gamma() == 1.0 && params.delta() == 0.0 {
        let base = (ONE + y.conj() * x) / (1.0 + y.norm_sqr());
        return Ok(((cln(base) * table.len() as f64).exp(), 1.0));
    }
    Ok(single_ratio_series(x, y, table))
}

/// Coefficient-sum evaluation of [`single_ratio`] for `x ≠ y`, `y ≠ 0`, with
/// its condition number `Σ d_j |x/y|^j / |Σ d_j (x/y)^j|`.
fn single_ratio_series(x: Complex64, y: Complex64, table: &[(f64, f64)]) -> (Complex64, f64) {
    let n = table.len();
    // (r_j, 1 − r_j) for j = 0..=N+1.
    let pair = |j: usize| -> (f64, f64) {
        if j == 0 {
            (1.0, 0.0)
        } else if j > n {
            (0.0, 1.0)
        } else {
            table[j - 1]
        }
    };
    let lw = cln(x) - y.ln();
    let mut acc = CompensatedSum::default();
    let mut magnitude = 0.0;
    for j in 0..=n {
        let ((r0, c0), (r1, c1)) = (pair(j), pair(j + 1));
        let d = if r0 <= 0.5 { r0 - r1 } else { c1 - c0 };
        if d <= 0.0 {
            continue;
        }
        if j == 0 {
            acc.add(Complex64::new(d, 0.0));
            magnitude += d;
        } else if x != ZERO {
            let term = (lw * j as f64 + d.ln()).exp();
            acc.add(term);
            magnitude += term.norm();
        }
    }
    let value = acc.value();
    (value, magnitude / value.norm())
}

/// Chooses between the direct and the `a ↔ b` swapped representation so that
/// `|b|/‖ν‖` stays as large as possible on the given points.
fn choose_representation(nus: &[[Complex64; 2]]) -> Result<bool> {
    let score = |idx: usize| {
        nus.iter()
            .map(|nu| nu[idx].norm() / norm2(nu).sqrt())
            .fold(f64::INFINITY, f64::min)
    };
    let (direct, swapped) = (score(1), score(0));
    if nus.is_empty() {
        return Ok(false);
    }
    if direct.max(swapped) < 1e-12 {
        return Err(Error::Continuation(
            "both b and a are numerically zero at some of the points".into(),
        ));
    }
    Ok(swapped > direct)
}

/// Equilibrated log-determinant with a condition estimate.
fn scaled_log_det(m: &ComplexMatrix) -> Result<(LogDet, f64)> {
    let n = m.dim();
    let mut log_scale = 0.0;
    let mut work = m.clone();
    for i in 0..n {
        let s = (0..n).map(|j| work[(i, j)].norm()).fold(0.0, f64::max);
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::numerical("partition", format!("row {i} is zero or non-finite")));
        }
        for j in 0..n {
            work[(i, j)] /= s;
        }
        log_scale += s.ln();
    }
    for j in 0..n {
        let s = (0..n).map(|i| work[(i, j)].norm()).fold(0.0, f64::max);
        if !(s > 0.0) {
            return Ok((
                LogDet {
                    ln_abs: f64::NEG_INFINITY,
                    phase: ONE,
                },
                f64::INFINITY,
            ));
        }
        for i in 0..n {
            work[(i, j)] /= s;
        }
        log_scale += s.ln();
    }
    let ld = work.log_det();
    let cond = work.condition_inf();
    Ok((
        LogDet {
            ln_abs: ld.ln_abs + log_scale,
            phase: ld.phase,
        },
        cond,
    ))
}

fn logdet_to_complex(ld: LogDet) -> Complex64 {
    Complex64::new(ld.ln_abs, ld.phase.arg())
}

/// Removes projectively coincident numerator/denominator pairs. Returns the
/// surviving indices and `Σ ln c` over removed pairs, where `ν(p) = c ν(q)`.
fn remove_coincident(p: &[[Complex64; 2]], q: &[[Complex64; 2]]) -> (Vec<usize>, Vec<usize>, Complex64) {
    let mut used_q = vec![false; q.len()];
    let mut keep_p = Vec::new();
    let mut log_c = ZERO;
    for (i, nu_p) in p.iter().enumerate() {
        let hit = (0..q.len()).find(|&j| !used_q[j] && projectively_equal(nu_p, &q[j]));
        match hit {
            Some(j) => {
                used_q[j] = true;
                let nq = &q[j];
                let c = (nu_p[0] * nq[0].conj() + nu_p[1] * nq[1].conj()) / norm2(nq);
                log_c += c.ln();
            }
            None => keep_p.push(i),
        }
    }
    let keep_q = (0..q.len()).filter(|&j| !used_q[j]).collect();
    (keep_p, keep_q, log_c)
}

fn check_distinct(label: &str, nus: &[[Complex64; 2]]) -> Result<()> {
    for i in 0..nus.len() {
        for j in i + 1..nus.len() {
            if projectively_equal(&nus[i], &nus[j]) {
                return Err(Error::Degenerate {
                    i,
                    j,
                    detail: format!("{label} points are projectively coincident on the curve"),
                });
            }
        }
    }
    Ok(())
}

/// Cauchy-like kernel `Q_m = (1/(ν(pᵢ)ᵀJν(qⱼ)))` with `νᵀJν' = a b' − b a'`.
///
/// # Errors
/// Degenerate-configuration error naming the entry whose denominator vanishes.
///
/// # Example
/// ```
/// use num_complex::Complex64;
/// use winding_rmt::curves::monomial_curve;
/// use winding_rmt::partition::{cauchy_kernel, PointPairs};
/// let curve = monomial_curve(1.0, 1, 1.0, 0).unwrap();
/// let i = Complex64::new(0.0, 1.0);
/// let pts = PointPairs::simple(vec![Complex64::new(1.0, 0.0)], vec![i]).unwrap();
/// let q = cauchy_kernel(&curve, &pts).unwrap();
/// assert!((q[(0, 0)] - 1.0 / (1.0 - i)).norm() < 1e-15);
/// ```
pub fn cauchy_kernel(curve: &CurvePair, pts: &PointPairs) -> Result<ComplexMatrix> {
    let m = pts.m1();
    let mut out = ComplexMatrix::zeros(m);
    for i in 0..m {
        let nu_p = curve.nu(pts.p[i]);
        for j in 0..m {
            let nu_q = curve.nu(pts.q[j]);
            let d = symplectic(&nu_p, &nu_q);
            if d.norm() <= COINCIDENCE_MARGIN * (norm2(&nu_p) * norm2(&nu_q)).sqrt() {
                return Err(Error::Degenerate {
                    i,
                    j,
                    detail: "ν(p)ᵀJν(q) vanishes".into(),
                });
            }
            out[(i, j)] = ONE / d;
        }
    }
    Ok(out)
}

/// Deformed kernel `Q̃_m^{(N)}` with entries
/// `(b(pᵢ)/b(qⱼ))^N/(ν(pᵢ)ᵀJν(qⱼ)) · [1 + (1 − κ(qⱼ)/κ(pᵢ)) Υ_N(κ(pᵢ), κ(qⱼ))]`.
///
/// The bracket is evaluated in a form that stays regular at `κ(pᵢ) = 0`.
///
/// # Errors
/// Degenerate entries as in [`cauchy_kernel`]; a continuation error when
/// `b(qⱼ) = 0` (the direct representation is singular there).
pub fn deformed_kernel(curve: &CurvePair, pts: &PointPairs, hw: &HatWeight) -> Result<ComplexMatrix> {
    let q0 = cauchy_kernel(curve, pts)?;
    let m = pts.m1();
    let n = hw.n() as f64;
    let mut out = ComplexMatrix::zeros(m);
    for j in 0..m {
        let [aq, bq] = curve.nu(pts.q[j]);
        if bq == ZERO {
            return Err(Error::Continuation(format!("b vanishes at q[{j}]")));
        }
        let y = -aq / bq;
        let table = ratio_table(y, hw)?;
        for i in 0..m {
            let [ap, bp] = curve.nu(pts.p[i]);
            if bp == ZERO {
                return Err(Error::Continuation(format!("b vanishes at p[{i}]")));
            }
            let x = -ap / bp;
            let (bracket, _) = single_ratio(x, y, &table, hw)?;
            let scale = ((bp.ln() - bq.ln()) * n).exp();
            out[(i, j)] = scale * q0[(i, j)] * bracket;
        }
    }
    Ok(out)
}

/// Partition function `Z_m^{(N)} = det Q̃ / det Q` as a ratio of kernel determinants (no conjugated factors).
///
/// Projectively coincident `(pᵢ, qⱼ)` pairs are factored out exactly
/// (`ν(p) = cν(q)` contributes `c^N`), so `Z(p, p) = 1` holds exactly.
///
/// # Errors
/// Validation error when `m₂ ≠ 0`; degenerate-configuration errors for
/// coincident denominator points.
///
/// # Example
/// ```
/// use winding_rmt::curves::example_curve;
/// use winding_rmt::partition::{partition_m, PointPairs};
/// use winding_rmt::polya::{HatWeight, MBParams};
/// let hw = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 7).unwrap();
/// let pts = PointPairs::from_turns(&[0.1, 0.6], &[0.1, 0.6], &[], &[]).unwrap();
/// let z = partition_m(&example_curve(), &pts, &hw).unwrap();
/// assert_eq!(z.value.re, 1.0);
/// ```
pub fn partition_m(curve: &CurvePair, pts: &PointPairs, hw: &HatWeight) -> Result<PartitionResult> {
    if pts.m2() != 0 {
        return Err(Error::Validation("partition_m takes no conjugated points".into()));
    }
    partition_impl(curve, pts, hw, None, None)
}

/// Partition function `Z_{m₁,m₂}^{(N)}` as a block determinant, including conjugated ratios
/// `Π conj(det K(p̃)/det K(q̃))`.
///
/// The block determinant is assembled from the pre-kernel
/// `−Σ_{k<N} (x̃x)^k/(πM[ω̂](k+1))`, the single-ratio kernels, and the
/// Stieltjes kernel; the normalisation is fixed so that `Z = 1` at
/// `p = q, p̃ = q̃`.
pub fn partition_general(
    curve: &CurvePair,
    pts: &PointPairs,
    hw: &HatWeight,
    spec: &QuadratureSpec,
) -> Result<PartitionResult> {
    spec.validate()?;
    partition_impl(curve, pts, hw, Some(spec), None)
}

/// Partition function with an explicitly forced representation (`Some(true)`
/// selects the `a ↔ b` swapped one); used to test the model symmetry.
pub(crate) fn partition_impl(
    curve: &CurvePair,
    pts: &PointPairs,
    hw: &HatWeight,
    spec: Option<&QuadratureSpec>,
    force_swap: Option<bool>,
) -> Result<PartitionResult> {
    let n = hw.n() as f64;
    let nus = |v: &[Complex64]| -> Vec<[Complex64; 2]> { v.iter().map(|&z| curve.nu(z)).collect() };
    let (np, nq, npt, nqt) = (nus(&pts.p), nus(&pts.q), nus(&pts.p_tilde), nus(&pts.q_tilde));
    let (kp, kq, log_c) = remove_coincident(&np, &nq);
    let (kpt, kqt, log_ct) = remove_coincident(&npt, &nqt);
    let pick = |all: &[[Complex64; 2]], idx: &[usize]| -> Vec<[Complex64; 2]> { idx.iter().map(|&i| all[i]).collect() };
    let (np, nq, npt, nqt) = (pick(&np, &kp), pick(&nq, &kq), pick(&npt, &kpt), pick(&nqt, &kqt));
    let mut log_total = (log_c + log_ct.conj()) * n;
    let (m1, m2) = (np.len(), npt.len());
    if m1 == 0 && m2 == 0 {
        return Ok(PartitionResult::from_log(log_total, 1.0));
    }
    check_distinct("q", &nq)?;
    check_distinct("p", &np)?;
    check_distinct("q_tilde", &nqt)?;
    check_distinct("p_tilde", &npt)?;

    let all: Vec<[Complex64; 2]> = np.iter().chain(&nq).chain(&npt).chain(&nqt).copied().collect();
    let swap = match force_swap {
        Some(s) => s,
        None => choose_representation(&all)?,
    };
    let (ia, ib) = if swap { (1, 0) } else { (0, 1) };
    for nu in &all {
        if nu[ib] == ZERO {
            return Err(Error::Continuation("the chosen representation is singular at a point".into()));
        }
    }
    let neg_kappa = |nu: &[Complex64; 2]| -nu[ia] / nu[ib];
    let xs: Vec<Complex64> = np.iter().map(neg_kappa).collect();
    let ys: Vec<Complex64> = nq.iter().map(neg_kappa).collect();
    let xts: Vec<Complex64> = npt.iter().map(|nu| neg_kappa(nu).conj()).collect();
    let yts: Vec<Complex64> = nqt.iter().map(|nu| neg_kappa(nu).conj()).collect();

    // (b(p)/b(q))^N prefactors.
    let sum_lb = |v: &[[Complex64; 2]]| v.iter().map(|nu| nu[ib].ln()).sum::<Complex64>();
    log_total += (sum_lb(&np) - sum_lb(&nq)) * n;
    log_total += ((sum_lb(&npt) - sum_lb(&nqt)) * n).conj();

    let tables: Vec<Vec<(f64, f64)>> = ys.iter().map(|&y| ratio_table(y, hw)).collect::<Result<_>>()?;
    let tables_t: Vec<Vec<(f64, f64)>> = yts.iter().map(|&y| ratio_table(y, hw)).collect::<Result<_>>()?;

    let cauchy = |x: &[Complex64], y: &[Complex64]| ComplexMatrix::from_fn(x.len(), |j, i| ONE / (y[j] - x[i]));
    let mut condition = 1.0f64;
    if m2 == 0 {
        let mut w = ComplexMatrix::zeros(m1);
        for j in 0..m1 {
            for i in 0..m1 {
                let (e, ce) = single_ratio(xs[i], ys[j], &tables[j], hw)?;
                condition = condition.max(ce);
                w[(j, i)] = e / (ys[j] - xs[i]);
            }
        }
        let (ld_w, cw) = scaled_log_det(&w)?;
        let (ld_c, cc) = scaled_log_det(&cauchy(&xs, &ys))?;
        condition = condition.max(cw).max(cc);
        log_total += logdet_to_complex(ld_w) - logdet_to_complex(ld_c);
        return Ok(PartitionResult::from_log(log_total, condition));
    }

    let spec = spec.ok_or_else(|| Error::Validation("conjugated points require partition_general".into()))?;
    let size = m1 + m2;
    let mut s = ComplexMatrix::zeros(size);
    let ln_h: Vec<f64> = (0..hw.n())
        .map(|k| Ok(PI.ln() + hw.ln_mellin(k as f64 + 1.0)?))
        .collect::<Result<_>>()?;
    for l in 0..m2 {
        for i in 0..m1 {
            let lw = cln(xts[l] * xs[i]);
            let mut acc = CompensatedSum::default();
            for (k, lh) in ln_h.iter().enumerate() {
                if k == 0 {
                    acc.add(Complex64::new((-lh).exp(), 0.0));
                } else if lw.re > f64::NEG_INFINITY {
                    acc.add((lw * k as f64 - lh).exp());
                }
            }
            s[(l, i)] = -acc.value();
        }
        for lp in 0..m2 {
            let (e, ce) = single_ratio(xts[l], yts[lp], &tables_t[lp], hw)?;
            condition = condition.max(ce);
            s[(l, m1 + lp)] = e / (yts[lp] - xts[l]);
        }
    }
    for j in 0..m1 {
        for i in 0..m1 {
            let (e, ce) = single_ratio(xs[i], ys[j], &tables[j], hw)?;
            condition = condition.max(ce);
            s[(m2 + j, i)] = e / (ys[j] - xs[i]);
        }
        for lp in 0..m2 {
            s[(m2 + j, m1 + lp)] = stieltjes_bracket(ys[j], yts[lp], hw, hw.n(), spec.tolerance)? * PI;
        }
    }
    let (ld_s, cs) = scaled_log_det(&s)?;
    let (ld_c, cc) = if m1 > 0 { scaled_log_det(&cauchy(&xs, &ys))? } else { (LogDet { ln_abs: 0.0, phase: ONE }, 1.0) };
    let (ld_ct, cct) = scaled_log_det(&cauchy(&xts, &yts))?;
    condition = condition.max(cs).max(cc).max(cct);
    log_total += logdet_to_complex(ld_s) - logdet_to_complex(ld_c) - logdet_to_complex(ld_ct);
    if (m1 * m2) % 2 == 1 {
        log_total += Complex64::new(0.0, PI);
    }
    Ok(PartitionResult::from_log(log_total, condition))
}

/// `S[ω̂σ_{r,R}](w) − Σ_{k=1}^{terms} M[ω̂](k) r_k(|α|²) r_k(|β|²)/w^k` with `w = αβ`.
fn stieltjes_bracket(alpha: Complex64, beta: Complex64, hw: &HatWeight, terms: usize, tol: f64) -> Result<Complex64> {
    let (sa, sb) = (alpha.norm_sqr(), beta.norm_sqr());
    let (r, big_r) = (sa.min(sb), sa.max(sb));
    let w = alpha * beta;
    if big_r == 0.0 {
        return Err(Error::Continuation("both Stieltjes arguments vanish".into()));
    }
    let on_real_axis = w.im.abs() <= 1e-12 * w.norm().max(1e-300) && w.re >= 0.0;
    if on_real_axis && r > 0.0 && (w.re <= r * (1.0 + 1e-12) || w.re >= big_r * (1.0 - 1e-12)) {
        return Err(Error::Degenerate {
            i: 0,
            j: 0,
            detail: format!("αβ = {w} lies in the support of the Stieltjes measure"),
        });
    }
    if on_real_axis && r == 0.0 && w.re >= big_r * (1.0 - 1e-12) {
        return Err(Error::Degenerate {
            i: 0,
            j: 0,
            detail: format!("αβ = {w} lies in the support of the Stieltjes measure"),
        });
    }
    let density = |t: f64| if t > 0.0 { hw.ln_density(t).exp() } else { 0.0 };
    let mut s = ZERO;
    if r > 0.0 {
        s += adaptive_integral_complex(|t| density(t) / (w - t), 0.0, Upper::Finite(r), tol)?;
    }
    s -= adaptive_integral_complex(|t| density(t) / (w - t), big_r, Upper::Infinity, tol)?;
    if terms == 0 {
        return Ok(s);
    }
    if w == ZERO {
        return if origin_limit_vanishes(hw) { Ok(s) } else { Err(origin_error()) };
    }
    let lw = w.ln();
    let mut acc = CompensatedSum::default();
    for k in 1..=terms.min(hw.n()) {
        let ra = hat_mellin_ratio(k, sa, hw)?;
        let rb = hat_mellin_ratio(k, sb, hw)?;
        if ra == 0.0 || rb == 0.0 {
            continue;
        }
        let lm = hw.ln_mellin(k as f64)?;
        acc.add((Complex64::new(lm + ra.ln() + rb.ln(), 0.0) - lw * k as f64).exp());
    }
    Ok(s - acc.value())
}

/// Stieltjes-type kernel entry
/// `S[ω̂σ_{r,R}](αβ) − Σ_{k=1}^{N−1} M[ω̂](k,|α|²)M[ω̂](k,|β|²)/(M[ω̂](k)(αβ)^k)`,
/// where `σ_{r,R} = 1_{[0,r]} − 1_{[R,∞)}`, `r = min(|α|², |β|²)`, `R = max(|α|², |β|²)`.
///
/// The Stieltjes part is integrated adaptively on `[0, r]` and `[R, ∞)`.
///
/// # Errors
/// Domain error for `α = 0` or `β = 0`; degenerate-configuration error when
/// `αβ` is real, positive and inside the support `[0, r] ∪ [R, ∞)`.
pub fn stieltjes_kernel_entry(alpha: Complex64, beta: Complex64, hw: &HatWeight, spec: &QuadratureSpec) -> Result<Complex64> {
    spec.validate()?;
    if alpha == ZERO || beta == ZERO {
        return Err(Error::domain("stieltjes_kernel_entry", "arguments must be nonzero"));
    }
    stieltjes_bracket(alpha, beta, hw, hw.n() - 1, spec.tolerance)
}

/// Closed-form GinUE partition function
/// `det[(1/ν(pᵢ)ᵀJν(qⱼ))·(ν(qⱼ)†ν(pᵢ)/ν(qⱼ)†ν(qⱼ))^N] / det[1/ν(pᵢ)ᵀJν(qⱼ)]`.
///
/// # Example
/// ```
/// use num_complex::Complex64;
/// use winding_rmt::curves::monomial_curve;
/// use winding_rmt::partition::{gaussian_partition, PointPairs};
/// let curve = monomial_curve(1.0, 1, 1.0, 0).unwrap();
/// let (p, q) = (Complex64::from_polar(1.0, 0.4), Complex64::from_polar(1.0, 1.9));
/// let z = gaussian_partition(&curve, &PointPairs::simple(vec![p], vec![q]).unwrap(), 4).unwrap();
/// let expected = ((q.conj() * p + 1.0) / 2.0).powi(4);
/// assert!((z.value - expected).norm() < 1e-13);
/// ```
pub fn gaussian_partition(curve: &CurvePair, pts: &PointPairs, n: usize) -> Result<PartitionResult> {
    if pts.m2() != 0 {
        return Err(Error::Validation("gaussian_partition takes no conjugated points".into()));
    }
    if n == 0 {
        return Err(Error::domain("gaussian_partition", "matrix size must be positive"));
    }
    let nf = n as f64;
    let np: Vec<[Complex64; 2]> = pts.p.iter().map(|&z| curve.nu(z)).collect();
    let nq: Vec<[Complex64; 2]> = pts.q.iter().map(|&z| curve.nu(z)).collect();
    let (kp, kq, log_c) = remove_coincident(&np, &nq);
    let np: Vec<_> = kp.iter().map(|&i| np[i]).collect();
    let nq: Vec<_> = kq.iter().map(|&j| nq[j]).collect();
    let mut log_total = log_c * nf;
    let m = np.len();
    if m == 0 {
        return Ok(PartitionResult::from_log(log_total, 1.0));
    }
    check_distinct("q", &nq)?;
    check_distinct("p", &np)?;
    let mut logs = vec![ZERO; m * m];
    let mut plain = ComplexMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            let d = symplectic(&np[i], &nq[j]);
            let overlap = (nq[j][0].conj() * np[i][0] + nq[j][1].conj() * np[i][1]) / norm2(&nq[j]);
            logs[i * m + j] = cln(overlap) * nf - d.ln();
            plain[(i, j)] = ONE / d;
        }
    }
    let (ld_num, c1) = log_det_from_logs(m, &logs)?;
    let (ld_den, c2) = scaled_log_det(&plain)?;
    log_total += ld_num - logdet_to_complex(ld_den);
    Ok(PartitionResult::from_log(log_total, c1.max(c2)))
}

/// Log-determinant of the matrix `exp(L)` given entrywise complex logs, with
/// row and column equilibration performed in log space.
fn log_det_from_logs(m: usize, logs: &[Complex64]) -> Result<(Complex64, f64)> {
    let mut re: Vec<f64> = logs.iter().map(|l| l.re).collect();
    let mut shift = 0.0;
    for i in 0..m {
        let mx = (0..m).map(|j| re[i * m + j]).fold(f64::NEG_INFINITY, f64::max);
        if mx == f64::NEG_INFINITY {
            return Ok((Complex64::new(f64::NEG_INFINITY, 0.0), f64::INFINITY));
        }
        for j in 0..m {
            re[i * m + j] -= mx;
        }
        shift += mx;
    }
    for j in 0..m {
        let mx = (0..m).map(|i| re[i * m + j]).fold(f64::NEG_INFINITY, f64::max);
        if mx == f64::NEG_INFINITY {
            return Ok((Complex64::new(f64::NEG_INFINITY, 0.0), f64::INFINITY));
        }
        for i in 0..m {
            re[i * m + j] -= mx;
        }
        shift += mx;
    }
    let mat = ComplexMatrix::from_fn(m, |i, j| Complex64::from_polar(re[i * m + j].exp(), logs[i * m + j].im));
    let ld = mat.log_det();
    Ok((Complex64::new(ld.ln_abs + shift, ld.phase.arg()), mat.condition_inf()))
}

/// Exact 1-point winding density
/// `C₁(p) = N b′/b + (κ′/κ) Υ_N(κ, κ)` for `|a(p)| ≤ |b(p)|`, and the swapped
/// form `N a′/a − (κ′/κ) Υ_N(1/κ, 1/κ)` otherwise.
///
/// At an exact zero of `a` (resp. `b`) the finite limit `N b′/b` (resp.
/// `N a′/a`) is returned.
///
/// # Example
/// ```
/// use num_complex::Complex64;
/// use winding_rmt::curves::monomial_curve;
/// use winding_rmt::partition::c1_exact;
/// use winding_rmt::polya::{HatWeight, MBParams};
/// let hw = HatWeight::new(MBParams::ginibre(), 5).unwrap();
/// let p = Complex64::from_polar(1.0, 0.3);
/// let v = c1_exact(&monomial_curve(1.0, 1, 1.0, 0).unwrap(), p, &hw).unwrap();
/// assert!((v - 2.5 / p).norm() < 1e-12);
/// ```
pub fn c1_exact(curve: &CurvePair, p: Complex64, hw: &HatWeight) -> Result<Complex64> {
    let frame = curve_frame(curve, p)?;
    let [a, b] = frame.nu;
    let [da, db] = frame.nu_prime;
    let n = hw.n() as f64;
    if a == ZERO {
        return Ok(db / b * n);
    }
    if b == ZERO {
        return Ok(da / a * n);
    }
    let log_deriv = da / a - db / b;
    if a.norm() <= b.norm() {
        let ups = ratio_sum((a / b).norm_sqr(), hw)?;
        Ok(db / b * n + log_deriv * ups)
    } else {
        let ups = ratio_sum((b / a).norm_sqr(), hw)?;
        Ok(da / a * n - log_deriv * ups)
    }
}

/// Mean winding number `(1/2πi)∮ C₁(p) dp`.
///
/// Curves without circle zeros use the periodic trapezoid rule; otherwise the
/// circle is covered by panels graded towards each zero of `a` or `b`, where
/// the density is only finitely smooth.
///
/// # Errors
/// Accuracy error when the imaginary residue exceeds `1e-8` (relative to
/// `max(1, |mean|)`).
///
/// # Example
/// ```
/// use winding_rmt::curves::monomial_curve;
/// use winding_rmt::numerics::QuadratureSpec;
/// use winding_rmt::partition::mean_winding_exact;
/// use winding_rmt::polya::{HatWeight, MBParams};
/// let hw = HatWeight::new(MBParams::ginibre(), 5).unwrap();
/// let curve = monomial_curve(1.0, 1, 1.0, 0).unwrap();
/// let w = mean_winding_exact(&curve, &hw, &QuadratureSpec::default()).unwrap();
/// assert!((w - 2.5).abs() < 1e-12);
/// ```
pub fn mean_winding_exact(curve: &CurvePair, hw: &HatWeight, spec: &QuadratureSpec) -> Result<f64> {
    let zeros = curve.all_zeros();
    let failure = std::cell::Cell::new(None);
    let f = |p: Complex64| match c1_exact(curve, p, hw) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            Complex64::new(f64::NAN, 0.0)
        }
    };
    let value = if zeros.is_empty() {
        circle_integral(f, spec)
    } else {
        circle_integral_graded(f, &zeros, spec)
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let value = value?;
    if value.im.abs() > 1e-8 * value.re.abs().max(1.0) {
        return Err(Error::Accuracy {
            op: "mean_winding_exact",
            estimate: value.re,
            error_bound: value.im.abs(),
        });
    }
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{example_curve, monomial_curve, validate_curve, LaurentPolynomial};
    use crate::numerics::adaptive_integral_complex;
    use crate::polya::MBParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn on_circle(t: f64) -> Complex64 {
        Complex64::from_polar(1.0, t)
    }

    /// `E[f(z)]` for a single eigenvalue with density `ω̂(|z|²)/π`, by nested
    /// adaptive quadrature in polar coordinates with breakpoints at the
    /// singular radii and angles.
    fn brute_single<F: Fn(Complex64) -> Complex64>(
        f: F,
        hw: &HatWeight,
        radii: &[f64],
        angles: &[f64],
    ) -> Complex64 {
        let mut rb: Vec<f64> = radii.iter().map(|r| r * r).filter(|&t| t > 0.0).collect();
        rb.sort_by(f64::total_cmp);
        let mut ab: Vec<f64> = angles.iter().map(|a| a.rem_euclid(2.0 * PI)).collect();
        ab.push(0.0);
        ab.push(2.0 * PI);
        ab.sort_by(f64::total_cmp);
        let angular = |t: f64| -> Complex64 {
            let rho = t.sqrt();
            let mut acc = ZERO;
            for w in ab.windows(2) {
                if w[1] > w[0] {
                    acc += adaptive_integral_complex(|th| f(Complex64::from_polar(rho, th)), w[0], Upper::Finite(w[1]), 1e-11)
                        .unwrap();
                }
            }
            acc * (hw.ln_density(t).exp() / (2.0 * PI))
        };
        let mut acc = ZERO;
        let mut lo = 0.0;
        for &b in &rb {
            acc += adaptive_integral_complex(&angular, lo, Upper::Finite(b), 1e-10).unwrap();
            lo = b;
        }
        acc + adaptive_integral_complex(&angular, lo, Upper::Infinity, 1e-10).unwrap()
    }

    #[test]
    fn upsilon_symmetries() {
        let hw = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 9).unwrap();
        for &(u, v) in &[(c(0.3, 0.8), c(-1.1, 0.4)), (c(2.0, -0.5), c(0.7, 0.2)), (c(-0.4, -0.9), c(1.5, 1.5))] {
            let d = upsilon(u, u, &hw).unwrap() + upsilon(ONE / u, ONE / u, &hw).unwrap();
            assert!((d - 9.0).norm() < 1e-10 * 9.0);
            let w = u / v;
            let rhs = w * ((w.powu(9) - ONE) / (w - ONE) - w.powu(9) * upsilon(ONE / u, ONE / v, &hw).unwrap());
            let lhs = upsilon(u, v, &hw).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
        }
        let big = c(1e6, 1e6);
        assert!((upsilon(big, big, &hw).unwrap() - 9.0).norm() < 1e-9);
        assert!(upsilon(ONE, ZERO, &hw).is_err());
    }

    #[test]
    fn single_ratio_matches_brute_force_at_n1() {
        let hw = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 1).unwrap();
        for &(x, y) in &[(c(0.3, 0.4), c(-0.8, 0.5)), (c(1.7, -0.2), c(0.2, 0.3))] {
            let (exact, _) = single_ratio(x, y, &ratio_table(y, &hw).unwrap(), &hw).unwrap();
            let brute = brute_single(|z| (z - x) / (z - y), &hw, &[y.norm()], &[y.arg()]);
            assert!((exact - brute).norm() < 1e-8, "{exact} vs {brute}");
        }
    }

    #[test]
    fn series_matches_binomial_closed_form_within_its_conditioning() {
        for n in [3usize, 12, 40] {
            let hw = HatWeight::new(MBParams::ginibre(), n).unwrap();
            for &(x, y) in &[(c(0.3, 0.4), c(-0.8, 0.5)), (c(1.7, -0.2), c(0.2, 0.3)), (c(-2.0, 0.1), c(0.9, 0.0))] {
                let table = ratio_table(y, &hw).unwrap();
                let (closed, _) = single_ratio(x, y, &table, &hw).unwrap();
                let (series, cond) = single_ratio_series(x, y, &table);
                let tau = y.norm_sqr() / (1.0 + y.norm_sqr());
                let exact_cond = (1.0 - tau + tau * (x / y).norm()).powi(n as i32) / closed.norm();
                // Beyond ~1/ε the series value is noise and so is its self-estimated
                // condition, which must then still flag the loss.
                if exact_cond < 1e10 {
                    assert!((cond / exact_cond - 1.0).abs() < 1e-4, "{cond} vs {exact_cond}");
                } else {
                    assert!(cond > 1e10, "{cond} vs {exact_cond}");
                }
                assert!((series - closed).norm() <= 1e-13 * exact_cond * closed.norm(), "N={n}: {series} vs {closed}");
            }
        }
    }

    #[test]
    fn coincident_pairs_give_exactly_one() {
        let hw = HatWeight::new(MBParams::new(0.5, 1.0).unwrap(), 30).unwrap();
        let spec = QuadratureSpec::default();
        let curve = example_curve();
        let pts = PointPairs::from_turns(&[0.05, 0.3, 0.71], &[0.71, 0.05, 0.3], &[0.2, 0.9], &[0.9, 0.2]).unwrap();
        let z = partition_general(&curve, &pts, &hw, &spec).unwrap();
        assert_eq!(z.value, ONE);
        let pts = PointPairs::from_turns(&[0.05, 0.3], &[0.05, 0.3], &[], &[]).unwrap();
        assert_eq!(partition_m(&curve, &pts, &hw).unwrap().value, ONE);
        assert_eq!(gaussian_partition(&curve, &pts, 12).unwrap().value, ONE);
    }

    #[test]
    fn kernel_determinant_matches_gaussian_closed_form() {
        let hw = HatWeight::new(MBParams::ginibre(), 8).unwrap();
        let curve = example_curve();
        let pts = PointPairs::from_turns(&[0.11, 0.47], &[0.83, 0.29], &[], &[]).unwrap();
        let a = partition_m(&curve, &pts, &hw).unwrap().value;
        let b = gaussian_partition(&curve, &pts, 8).unwrap().value;
        assert!((a - b).norm() < 1e-9 * b.norm(), "{a} vs {b}");
    }

    #[test]
    fn representation_swap_is_a_symmetry() {
        let hw = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 6).unwrap();
        let curve = example_curve();
        let pts = PointPairs::from_turns(&[0.13, 0.52], &[0.37, 0.9], &[], &[]).unwrap();
        let d = partition_impl(&curve, &pts, &hw, None, Some(false)).unwrap().value;
        let s = partition_impl(&curve, &pts, &hw, None, Some(true)).unwrap().value;
        assert!((d - s).norm() < 1e-10 * d.norm(), "{d} vs {s}");
    }

    #[test]
    fn block_determinant_reduces_to_kernel_determinant() {
        let hw = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 5).unwrap();
        let curve = example_curve();
        let pts = PointPairs::from_turns(&[0.13, 0.52], &[0.37, 0.9], &[], &[]).unwrap();
        let a = partition_m(&curve, &pts, &hw).unwrap().value;
        let b = partition_general(&curve, &pts, &hw, &QuadratureSpec::default()).unwrap().value;
        assert!((a - b).norm() <= 1e-12 * a.norm());
    }

    #[test]
    fn general_matches_brute_force_at_n1() {
        let hw = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 1).unwrap();
        let curve = example_curve();
        let spec = QuadratureSpec::default();
        let (p, q, pt, qt) = (on_circle(0.4), on_circle(2.2), on_circle(-1.0), on_circle(1.3));
        let pts = PointPairs::new(vec![p], vec![q], vec![pt], vec![qt]).unwrap();
        let exact = partition_general(&curve, &pts, &hw, &spec).unwrap().value;
        let [ap, bp] = curve.nu(p);
        let [aq, bq] = curve.nu(q);
        let [apt, bpt] = curve.nu(pt);
        let [aqt, bqt] = curve.nu(qt);
        let f = |z: Complex64| (ap + bp * z) / (aq + bq * z) * ((apt + bpt * z) / (aqt + bqt * z)).conj();
        let y = -aq / bq;
        let yt = -aqt / bqt;
        let brute = brute_single(f, &hw, &[y.norm(), yt.norm()], &[y.arg(), yt.arg()]);
        assert!((exact - brute).norm() < 1e-6, "{exact} vs {brute}");
    }

    #[test]
    fn stieltjes_entry_properties() {
        let hw = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 4).unwrap();
        let spec = QuadratureSpec::default();
        let (a, b) = (c(0.6, 0.9), c(-1.2, 0.3));
        let ab = stieltjes_kernel_entry(a, b, &hw, &spec).unwrap();
        let ba = stieltjes_kernel_entry(b, a, &hw, &spec).unwrap();
        assert!((ab - ba).norm() < 1e-12 * ab.norm().max(1.0));
        assert!(stieltjes_kernel_entry(a, a.conj(), &hw, &spec).is_err());
        let hw1 = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 1).unwrap();
        let s = stieltjes_kernel_entry(a, b, &hw1, &spec).unwrap();
        let brute = brute_single(|z| ONE / ((a - z) * (b - z.conj())), &hw1, &[a.norm(), b.norm()], &[a.arg(), -b.arg()]);
        assert!((s - brute).norm() < 1e-6, "{s} vs {brute}");
    }

    #[test]
    fn cauchy_kernel_antisymmetry_and_degeneracy() {
        let curve = example_curve();
        let pts = PointPairs::from_turns(&[0.1, 0.4, 0.75], &[0.2, 0.55, 0.9], &[], &[]).unwrap();
        let rev = PointPairs::from_turns(&[0.2, 0.55, 0.9], &[0.1, 0.4, 0.75], &[], &[]).unwrap();
        let a = cauchy_kernel(&curve, &pts).unwrap();
        let b = cauchy_kernel(&curve, &rev).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[(i, j)] + b[(j, i)]).norm() < 1e-14 * a[(i, j)].norm());
            }
        }
        let flat = validate_curve(LaurentPolynomial::constant(c(1.0, 0.0)), LaurentPolynomial::constant(c(2.0, 0.0))).unwrap();
        assert!(matches!(cauchy_kernel(&flat, &pts), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn c1_branches_agree_and_limits_are_finite() {
        let hw = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 11).unwrap();
        let curve = example_curve();
        let n = 11.0;
        for t in [0.3, 1.1, 2.5, 4.0, 5.5] {
            let p = on_circle(t);
            let f = curve_frame(&curve, p).unwrap();
            let [a, b] = f.nu;
            let [da, db] = f.nu_prime;
            let ld = da / a - db / b;
            let direct = db / b * n + ld * ratio_sum((a / b).norm_sqr(), &hw).unwrap();
            let swapped = da / a * n - ld * ratio_sum((b / a).norm_sqr(), &hw).unwrap();
            assert!((direct - swapped).norm() < 1e-10 * direct.norm().max(1.0));
        }
        let line = validate_curve(
            LaurentPolynomial::new([(1, c(1.0, 0.0)), (0, c(-1.0, 0.0))]),
            LaurentPolynomial::new([(0, c(2.0, 0.0)), (1, c(0.5, 0.0))]),
        )
        .unwrap();
        let v = c1_exact(&line, ONE, &hw).unwrap();
        assert!((v - 0.5 / 2.5 * n).norm() < 1e-14);
    }

    #[test]
    fn mean_winding_examples() {
        let spec = QuadratureSpec::default();
        let hw = HatWeight::new(MBParams::ginibre(), 5).unwrap();
        let flat = validate_curve(LaurentPolynomial::constant(c(1.0, 0.5)), LaurentPolynomial::constant(c(2.0, 0.0))).unwrap();
        assert!(mean_winding_exact(&flat, &hw, &spec).unwrap().abs() < 1e-14);
        let curve = monomial_curve(1.0, 1, 1.0, 0).unwrap();
        assert!((mean_winding_exact(&curve, &hw, &spec).unwrap() - 2.5).abs() < 1e-12);
        let rotated = curve.rescaled(Complex64::from_polar(1.0, 0.8));
        let ex = example_curve();
        let hw2 = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 9).unwrap();
        let w0 = mean_winding_exact(&ex, &hw2, &spec).unwrap();
        let w1 = mean_winding_exact(&ex.rescaled(Complex64::from_polar(1.0, 2.1)), &hw2, &spec).unwrap();
        assert!((w0 - w1).abs() < 1e-9);
        assert!((mean_winding_exact(&rotated, &hw, &spec).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn mean_winding_with_circle_zeros_converges() {
        // a = p − 1 vanishes at θ = 0; the density has a cusp there.
        let curve = validate_curve(
            LaurentPolynomial::new([(1, c(1.0, 0.0)), (0, c(-1.0, 0.0))]),
            LaurentPolynomial::new([(0, c(1.5, 0.0)), (-1, c(0.3, 0.0))]),
        )
        .unwrap();
        let hw = HatWeight::new(MBParams::new(2.0, 0.5).unwrap(), 10).unwrap();
        let w1 = mean_winding_exact(&curve, &hw, &QuadratureSpec::new(512, 1e-11, 4).unwrap()).unwrap();
        let w2 = mean_winding_exact(&curve, &hw, &QuadratureSpec::new(2048, 1e-11, 4).unwrap()).unwrap();
        assert!((w1 - w2).abs() < 1e-9, "{w1} vs {w2}");
    }
}
