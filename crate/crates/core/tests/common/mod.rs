//! Brute-force eigenvalue-integral oracles shared by the integration tests.
//!
//! Everything here is deliberately independent of the closed-form machinery:
//! expectations over the eigenvalues of the generalised ratio are computed
//! directly from the joint density `∝ |Δ(z)|² Π ω̂(|z_j|²)` by nested adaptive
//! quadrature in polar coordinates.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use winding_rmt::curves::CurvePair;
use winding_rmt::numerics::{adaptive_integral_complex, Upper};
use winding_rmt::partition::PointPairs;
use winding_rmt::polya::HatWeight;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// `∫ f(z) ω̂(|z|²) d²z / π` by nested adaptive quadrature, with the radial
/// variable `t = |z|²` split at the squared `radii` and the angle split at
/// `angles` (the locations of integrable singularities of `f`).
pub fn brute_single<F: Fn(Complex64) -> Complex64>(f: F, hw: &HatWeight, radii: &[f64], angles: &[f64]) -> Complex64 {
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
                acc += adaptive_integral_complex(|th| f(Complex64::from_polar(rho, th)), w[0], Upper::Finite(w[1]), 1e-10)
                    .expect("angular quadrature");
            }
        }
        acc * (hw.ln_density(t).exp() / (2.0 * PI))
    };
    let mut acc = ZERO;
    let mut lo = 0.0;
    for &b in &rb {
        acc += adaptive_integral_complex(&angular, lo, Upper::Finite(b), 1e-10).expect("radial quadrature");
        lo = b;
    }
    acc + adaptive_integral_complex(&angular, lo, Upper::Infinity, 1e-10).expect("radial quadrature")
}

/// Single-eigenvalue factor `F(z)` of the ratio of characteristic
/// polynomials, `Π (a(pᵢ)+b(pᵢ)z)/(a(qᵢ)+b(qᵢ)z) · Π conj(same for p̃, q̃)`,
/// together with the moduli and angles of its poles.
pub struct RatioFactor {
    num: Vec<(Complex64, Complex64)>,
    den: Vec<(Complex64, Complex64)>,
    num_conj: Vec<(Complex64, Complex64)>,
    den_conj: Vec<(Complex64, Complex64)>,
    pub pole_radii: Vec<f64>,
    pub pole_angles: Vec<f64>,
}

impl RatioFactor {
    pub fn new(curve: &CurvePair, pts: &PointPairs) -> Self {
        let ab = |z: &Complex64| -> (Complex64, Complex64) {
            let [a, b] = curve.nu(*z);
            (a, b)
        };
        let num: Vec<_> = pts.p().iter().map(ab).collect();
        let den: Vec<_> = pts.q().iter().map(ab).collect();
        let num_conj: Vec<_> = pts.p_tilde().iter().map(ab).collect();
        let den_conj: Vec<_> = pts.q_tilde().iter().map(ab).collect();
        let mut pole_radii = Vec::new();
        let mut pole_angles = Vec::new();
        for &(a, b) in den.iter().chain(den_conj.iter()) {
            if b.norm() > 0.0 {
                let z0 = -a / b;
                pole_radii.push(z0.norm());
                pole_angles.push(z0.arg());
            }
        }
        RatioFactor {
            num,
            den,
            num_conj,
            den_conj,
            pole_radii,
            pole_angles,
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = ONE;
        for (&(a, b), &(c, d)) in self.num.iter().zip(&self.den) {
            v *= (a + b * z) / (c + d * z);
        }
        for (&(a, b), &(c, d)) in self.num_conj.iter().zip(&self.den_conj) {
            v *= ((a + b * z) / (c + d * z)).conj();
        }
        v
    }
}

/// Partition function at `N = 1`: a single 2D integral of the ratio factor.
pub fn partition_oracle_n1(curve: &CurvePair, pts: &PointPairs, hw: &HatWeight) -> Complex64 {
    assert_eq!(hw.n(), 1);
    let f = RatioFactor::new(curve, pts);
    brute_single(|z| f.eval(z), hw, &f.pole_radii, &f.pole_angles)
}

/// Partition function at `N = 2`.
///
/// The 4D eigenvalue integral with weight `|z₁ − z₂|² ω̂(|z₁|²)ω̂(|z₂|²)`
/// factorises after expanding `|z₁ − z₂|²`:
/// `Z = (I[|z|²F]·I[F] − I[zF]·I[z̄F]) / (I[|z|²]·I[1] − |I[z]|²)`,
/// where `I[g] = ∫ g ω̂ d²z/π`. Each factor is a 2D adaptive quadrature.
pub fn partition_oracle_n2(curve: &CurvePair, pts: &PointPairs, hw: &HatWeight) -> Complex64 {
    assert_eq!(hw.n(), 2);
    let f = RatioFactor::new(curve, pts);
    let i = |g: &dyn Fn(Complex64) -> Complex64| brute_single(g, hw, &f.pole_radii, &f.pole_angles);
    let i_t_f = i(&|z| f.eval(z) * z.norm_sqr());
    let i_f = i(&|z| f.eval(z));
    let i_z_f = i(&|z| f.eval(z) * z);
    let i_zb_f = i(&|z| f.eval(z) * z.conj());
    let i_t = i(&|z| ONE * z.norm_sqr());
    let i_1 = i(&|_| ONE);
    let i_z = i(&|z| z);
    (i_t_f * i_f - i_z_f * i_zb_f) / (i_t * i_1 - i_z * i_z.conj())
}

/// Mean and standard error of a sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Two-sided Kolmogorov–Smirnov statistic of a sample against a CDF.
pub fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}
