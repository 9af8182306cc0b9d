//! Parameter functions `a(p)`, `b(p)` of the two-matrix field
//! `K(p) = a(p) K₁ + b(p) K₂`, represented as Laurent polynomials on the unit
//! circle, together with the derived frame `ν = (a, b)ᵀ`, `κ = a/b`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::PoleSet;

/// Finite Laurent polynomial `Σ_k c_k p^k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPolynomial {
    coefficients: BTreeMap<i32, Complex64>,
}

impl LaurentPolynomial {
    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed and zero coefficients dropped.
    pub fn new(terms: impl IntoIterator<Item = (i32, Complex64)>) -> Self {
        let mut coefficients = BTreeMap::new();
        for (k, c) in terms {
            *coefficients.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coefficients.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        LaurentPolynomial { coefficients }
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        LaurentPolynomial::default()
    }

    /// `c · p^k`.
    pub fn monomial(k: i32, c: Complex64) -> Self {
        LaurentPolynomial::new([(k, c)])
    }

    /// Constant polynomial.
    pub fn constant(c: Complex64) -> Self {
        LaurentPolynomial::monomial(0, c)
    }

    /// True for the identically vanishing polynomial.
    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Nonzero coefficients keyed by exponent.
    pub fn coefficients(&self) -> &BTreeMap<i32, Complex64> {
        &self.coefficients
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        LaurentPolynomial::new(self.coefficients.iter().map(|(&k, &v)| (k, v * c)))
    }

    /// Value (`order = 0`) or first derivative (`order = 1`) at `p ≠ 0`.
    pub fn eval(&self, p: Complex64, order: u8) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&k, &c) in &self.coefficients {
            acc += match order {
                0 => c * p.powi(k),
                _ => c * (k as f64) * p.powi(k - 1),
            };
        }
        acc
    }

    /// Zeros on the unit circle with multiplicities.
    ///
    /// The polynomial `p^{-k_min} · poly` is solved by Aberth–Ehrlich
    /// iteration; roots closer than `1e-5` are merged (their centroid is
    /// accurate even when a multiple root splits), and clusters whose centroid
    /// satisfies `|1 − |root|| ≤ 1e-9` are reported.
    pub fn circle_zeros(&self) -> Result<PoleSet> {
        let (Some((&kmin, _)), Some((&kmax, _))) =
            (self.coefficients.first_key_value(), self.coefficients.last_key_value())
        else {
            return Ok(PoleSet::empty());
        };
        let degree = (kmax - kmin) as usize;
        if degree == 0 {
            return Ok(PoleSet::empty());
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
        for (&k, &c) in &self.coefficients {
            coeffs[(k - kmin) as usize] = c;
        }
        let roots = aberth_roots(&coeffs)?;
        let mut clusters: Vec<(Complex64, u32)> = Vec::new();
        for r in roots {
            match clusters
                .iter_mut()
                .find(|(c, m)| (*c / *m as f64 - r).norm() < 1e-5)
            {
                Some(cluster) => {
                    cluster.0 += r;
                    cluster.1 += 1;
                }
                None => clusters.push((r, 1)),
            }
        }
        let mut found: Vec<(f64, u32)> = clusters
            .into_iter()
            .map(|(sum, m)| (sum / m as f64, m))
            .filter(|(z, _)| (1.0 - z.norm()).abs() <= 1e-9)
            .map(|(z, m)| (z.arg().rem_euclid(TAU), m))
            .collect();
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        PoleSet::new(found.iter().map(|f| f.0).collect(), found.iter().map(|f| f.1).collect())
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of `Σ_j coeffs[j] z^j` (leading and trailing coefficients nonzero).
fn aberth_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let radius = (coeffs[0] / lead).norm().powf(1.0 / d as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / d as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for k in 0..d {
            let (p, dp) = horner(coeffs, z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    // Multiple roots converge only linearly; accept the iterate if the residual is tiny.
    let scale: f64 = coeffs.iter().map(|c| c.norm()).sum();
    if z.iter().all(|&r| horner(coeffs, r).0.norm() <= 1e-10 * scale * (1.0 + r.norm()).powi(d as i32)) {
        return Ok(z);
    }
    Err(Error::numerical("validate_curve", "root finder did not converge"))
}

/// Value or derivative of a Laurent polynomial at a point of the unit circle.
pub fn eval_laurent(poly: &LaurentPolynomial, p: Complex64, derivative_order: u8) -> Complex64 {
    poly.eval(p, derivative_order)
}

/// A validated pair `(a, b)` with no common zero on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePair {
    pub a: LaurentPolynomial,
    pub b: LaurentPolynomial,
    pub zeros_a: PoleSet,
    pub zeros_b: PoleSet,
}

/// `κ = a/b` on the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Finite(Complex64),
    Infinity,
}

/// `κ′/κ = a′/a − b′/b`, or a marker naming which term is singular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogDerivative {
    Finite(Complex64),
    Singular { a_vanishes: bool, b_vanishes: bool },
}

/// Local frame of the curve at a point of the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFrame {
    pub nu: [Complex64; 2],
    pub nu_prime: [Complex64; 2],
    pub kappa: Kappa,
    pub kappa_log_deriv: LogDerivative,
}

impl CurvePair {
    /// The pair with the roles of `a` and `b` exchanged (the model is
    /// symmetric under `K₁ ↔ K₂`).
    pub fn swapped(&self) -> CurvePair {
        CurvePair {
            a: self.b.clone(),
            b: self.a.clone(),
            zeros_a: self.zeros_b.clone(),
            zeros_b: self.zeros_a.clone(),
        }
    }

    /// `(a(p), b(p))`.
    pub fn nu(&self, p: Complex64) -> [Complex64; 2] {
        [self.a.eval(p, 0), self.b.eval(p, 0)]
    }

    /// `(a′(p), b′(p))`.
    pub fn nu_prime(&self, p: Complex64) -> [Complex64; 2] {
        [self.a.eval(p, 1), self.b.eval(p, 1)]
    }

    /// Union of the circle zeros of `a` and `b`.
    pub fn all_zeros(&self) -> PoleSet {
        self.zeros_a.union(&self.zeros_b)
    }

    /// Multiplies both functions by a nonzero constant.
    pub fn rescaled(&self, c: Complex64) -> CurvePair {
        CurvePair {
            a: self.a.scaled(c),
            b: self.b.scaled(c),
            zeros_a: self.zeros_a.clone(),
            zeros_b: self.zeros_b.clone(),
        }
    }
}

/// Frame `(ν, ν′, κ, κ′/κ)` at `p`.
///
/// # Errors
/// Invariant violation when `a(p) = b(p) = 0`.
pub fn curve_frame(curve: &CurvePair, p: Complex64) -> Result<CurveFrame> {
    let nu = curve.nu(p);
    let nu_prime = curve.nu_prime(p);
    let zero = Complex64::new(0.0, 0.0);
    let (a_vanishes, b_vanishes) = (nu[0] == zero, nu[1] == zero);
    if a_vanishes && b_vanishes {
        return Err(Error::AssumptionViolation {
            angle: p.arg().rem_euclid(TAU),
        });
    }
    let kappa = if b_vanishes {
        Kappa::Infinity
    } else {
        Kappa::Finite(nu[0] / nu[1])
    };
    let kappa_log_deriv = if a_vanishes || b_vanishes {
        LogDerivative::Singular {
            a_vanishes,
            b_vanishes,
        }
    } else {
        LogDerivative::Finite(nu_prime[0] / nu[0] - nu_prime[1] / nu[1])
    };
    Ok(CurveFrame {
        nu,
        nu_prime,
        kappa,
        kappa_log_deriv,
    })
}

/// `ν_γ = (|a|^{γ−1} a, |b|^{γ−1} b)ᵀ`.
pub fn nu_gamma(curve: &CurvePair, p: Complex64, gamma: f64) -> [Complex64; 2] {
    let bend = |z: Complex64| {
        if z == Complex64::new(0.0, 0.0) {
            z
        } else {
            z * z.norm().powf(gamma - 1.0)
        }
    };
    let [a, b] = curve.nu(p);
    [bend(a), bend(b)]
}

fn cyclic_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Locates the circle zeros of `a` and `b` and rejects pairs that vanish
/// simultaneously somewhere on the circle.
///
/// # Errors
/// [`Error::AssumptionViolation`] with the offending angle, a validation error
/// when both functions are identically zero, or a numerical error from the
/// root finder.
pub fn validate_curve(a: LaurentPolynomial, b: LaurentPolynomial) -> Result<CurvePair> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Validation("a and b are both identically zero".into()));
    }
    let zeros_a = a.circle_zeros()?;
    let zeros_b = b.circle_zeros()?;
    if a.is_zero() {
        if let Some(&angle) = zeros_b.angles().first() {
            return Err(Error::AssumptionViolation { angle });
        }
    }
    if b.is_zero() {
        if let Some(&angle) = zeros_a.angles().first() {
            return Err(Error::AssumptionViolation { angle });
        }
    }
    for &ta in zeros_a.angles() {
        if zeros_b.angles().iter().any(|&tb| cyclic_distance(ta, tb) < 1e-8) {
            return Err(Error::AssumptionViolation { angle: ta });
        }
    }
    Ok(CurvePair {
        a,
        b,
        zeros_a,
        zeros_b,
    })
}

/// The curve of the introductory example:
/// `a(p) = (p − p⁻¹)/(2i) + p`, `b(p) = 3 − (p + p⁻¹)/10 + p⁻²`.
pub fn example_curve() -> CurvePair {
    let i = Complex64::new(0.0, 1.0);
    let half_over_i = Complex64::new(1.0, 0.0) / (2.0 * i);
    let a = LaurentPolynomial::new([(1, half_over_i + 1.0), (-1, -half_over_i)]);
    let b = LaurentPolynomial::new([
        (0, Complex64::new(3.0, 0.0)),
        (1, Complex64::new(-0.1, 0.0)),
        (-1, Complex64::new(-0.1, 0.0)),
        (-2, Complex64::new(1.0, 0.0)),
    ]);
    validate_curve(a, b).expect("the example curve satisfies the non-vanishing assumption")
}

/// Monomial curve `a = r₁ pⁿ`, `b = r₂ pᵐ`.
pub fn monomial_curve(r1: f64, n: i32, r2: f64, m: i32) -> Result<CurvePair> {
    validate_curve(
        LaurentPolynomial::monomial(n, Complex64::new(r1, 0.0)),
        LaurentPolynomial::monomial(m, Complex64::new(r2, 0.0)),
    )
}
