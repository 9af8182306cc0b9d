//! Quadrature configuration, adaptive Gauss–Kronrod integration on finite and
//! semi-infinite intervals, and Gauss–Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Grid and tolerance settings shared by circle integrals and adaptive rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Number of nodes on the unit circle (at least 16 and even).
    pub node_count: usize,
    /// Target absolute error for adaptive rules.
    pub tolerance: f64,
    /// Number of grid doublings (or panel-budget multiplier) allowed.
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            node_count: 1024,
            tolerance: 1e-11,
            max_refinements: 4,
        }
    }
}

impl QuadratureSpec {
    /// Validated constructor.
    pub fn new(node_count: usize, tolerance: f64, max_refinements: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            node_count,
            tolerance,
            max_refinements,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Grid used when extracting winding numbers from sampled determinants.
    pub fn winding_default() -> Self {
        QuadratureSpec {
            node_count: 512,
            tolerance: 1e-11,
            max_refinements: 4,
        }
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 16 || self.node_count % 2 != 0 {
            return Err(Error::Validation(format!(
                "node_count must be even and at least 16, got {}",
                self.node_count
            )));
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::Validation(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_refinements == 0 {
            return Err(Error::Validation("max_refinements must be positive".into()));
        }
        Ok(())
    }
}

/// Upper integration limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    Infinity,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Panel budget of the adaptive rule.
const MAX_PANELS: usize = 20_000;

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(centre - dx) + f(centre + dx);
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Evaluation {
            theta: centre,
            detail: "integrand is not finite on the panel".into(),
        });
    }
    Ok(Panel { a, b, value, error })
}

fn adapt<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::domain("adaptive_integral", "tolerance must be positive"));
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut heap = BinaryHeap::new();
    let mut settled = Complex64::new(0.0, 0.0);
    let mut settled_err = 0.0;
    // Start from a few panels so that narrow features are less likely to be missed.
    let initial = 4;
    for i in 0..initial {
        let lo = a + (b - a) * i as f64 / initial as f64;
        let hi = a + (b - a) * (i + 1) as f64 / initial as f64;
        heap.push(kronrod_panel(&f, lo, hi)?);
    }
    let mut panels = initial;
    let mut heap_err: f64 = heap.iter().map(|p: &Panel| p.error).sum();
    let mut heap_val: Complex64 = heap.iter().map(|p: &Panel| p.value).sum();
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps % 256 == 0 {
            // Resynchronise the running sum to avoid drift from cancellation.
            heap_err = heap.iter().map(|p| p.error).sum();
            heap_val = heap.iter().map(|p| p.value).sum();
        }
        let total_err = settled_err + heap_err.max(0.0);
        // An absolute target below the rounding floor of the result is unattainable.
        let floor = 64.0 * f64::EPSILON * (settled + heap_val).norm();
        if total_err <= tol.max(floor) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        heap_err -= worst.error;
        heap_val -= worst.value;
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || panels >= MAX_PANELS {
            if panels >= MAX_PANELS {
                heap.push(worst);
                let value = settled + heap.iter().map(|p| p.value).sum::<Complex64>();
                return Err(Error::Accuracy {
                    op: "adaptive_integral",
                    estimate: value.re,
                    error_bound: total_err,
                });
            }
            // Panel cannot be split further in floating point: accept it.
            settled += worst.value;
            settled_err += worst.error;
            continue;
        }
        let left = kronrod_panel(&f, worst.a, mid)?;
        let right = kronrod_panel(&f, mid, worst.b)?;
        heap_err += left.error + right.error;
        heap_val += left.value + right.value;
        heap.push(left);
        heap.push(right);
        panels += 1;
    }
    Ok(settled + heap.iter().map(|p| p.value).sum::<Complex64>())
}

/// Adaptive Gauss–Kronrod (7/15) integration of a complex-valued integrand.
///
/// Semi-infinite ranges are mapped onto `[0, 1)` through `t = lower + u/(1-u)`.
pub fn adaptive_integral_complex<F: Fn(f64) -> Complex64>(
    f: F,
    lower: f64,
    upper: Upper,
    tol: f64,
) -> Result<Complex64> {
    match upper {
        Upper::Finite(b) => {
            if b < lower {
                return Ok(-adapt(f, b, lower, tol)?);
            }
            adapt(f, lower, b, tol)
        }
        Upper::Infinity => adapt(
            |u: f64| {
                let w = 1.0 - u;
                // Nodes that round onto the endpoint carry no mass.
                if w <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let v = f(lower + u / w);
                if v == Complex64::new(0.0, 0.0) {
                    v
                } else {
                    v / (w * w)
                }
            },
            0.0,
            1.0,
            tol,
        ),
    }
}

/// Adaptive Gauss–Kronrod (7/15) integration of a real integrand.
///
/// # Example
/// ```
/// use winding_rmt::numerics::{adaptive_integral, Upper};
/// let v = adaptive_integral(|t| (-t).exp(), 0.0, Upper::Infinity, 1e-12).unwrap();
/// assert!((v - 1.0).abs() < 1e-11);
/// ```
pub fn adaptive_integral<F: Fn(f64) -> f64>(f: F, lower: f64, upper: Upper, tol: f64) -> Result<f64> {
    adaptive_integral_complex(|t| Complex64::new(f(t), 0.0), lower, upper, tol).map(|v| v.re)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
