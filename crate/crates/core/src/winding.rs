//! Winding numbers of sampled determinantal curves and Monte Carlo estimates
//! of their mean.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::curves::CurvePair;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, QuadratureSpec};
use crate::polya::HatWeight;
use crate::sampling::{dpp_eigenvalues, ginue_matrix, RandomStream};

/// Largest admissible argument increment between neighbouring nodes.
const MAX_INCREMENT: f64 = PI / 2.0;
/// Relative size below which a determinant sample counts as a gap closure.
const GAP_GUARD: f64 = 1e-12;

/// Monte Carlo estimate of the mean winding number.
#[derive(Debug, Clone, PartialEq)]
pub struct WindingEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by `√trials`.
    pub stderr: f64,
    /// Realisation counts per winding number; sums to `trials`.
    pub histogram: BTreeMap<i64, u64>,
    /// Number of realisations entering the estimate.
    pub trials: u64,
    /// Realisations discarded because the determinant came within the guard of zero.
    pub discarded: u64,
    /// Stream whose trial sub-streams produced the realisations.
    pub seed_record: RandomStream,
    /// Data-quality warning (set when more than 0.1% of realisations were discarded).
    pub warning: Option<String>,
}

impl WindingEstimate {
    /// Builds the estimate from a histogram; mean and variance are accumulated
    /// from exact integer sums so the result is independent of merge order.
    pub fn from_histogram(histogram: BTreeMap<i64, u64>, discarded: u64, seed_record: RandomStream) -> Result<Self> {
        let trials: u64 = histogram.values().sum();
        if trials == 0 {
            return Err(Error::Sampling("no realisation survived".into()));
        }
        let (mut s1, mut s2) = (0i128, 0i128);
        for (&w, &c) in &histogram {
            s1 += w as i128 * c as i128;
            s2 += (w as i128) * (w as i128) * c as i128;
        }
        let t = trials as f64;
        let mean = s1 as f64 / t;
        let var = if trials > 1 {
            ((s2 as f64 - s1 as f64 * s1 as f64 / t) / (t - 1.0)).max(0.0)
        } else {
            0.0
        };
        let attempted = trials + discarded;
        let warning = (discarded as f64 > 1e-3 * attempted as f64)
            .then(|| format!("{discarded} of {attempted} realisations discarded near gap closures"));
        Ok(WindingEstimate {
            mean,
            stderr: (var / t).sqrt(),
            histogram,
            trials,
            discarded,
            seed_record,
            warning,
        })
    }
}

/// Unwrapped argument increment `arg(next/prev)` of two unit phases.
fn increment(prev: Complex64, next: Complex64) -> f64 {
    (next * prev.conj()).arg()
}

/// Winding of a closed sequence of unit phases.
fn winding_from_phases(phases: &[Complex64]) -> Result<i64> {
    let m = phases.len();
    let mut total = 0.0;
    for j in 0..m {
        let d = increment(phases[j], phases[(j + 1) % m]);
        if d.abs() >= MAX_INCREMENT {
            return Err(Error::Resolution { node: j, increment: d });
        }
        total += d;
    }
    let w = total / TAU;
    let r = w.round();
    if (w - r).abs() > 1e-6 {
        return Err(Error::numerical("winding", format!("total increment {w} turns is not an integer")));
    }
    Ok(r as i64)
}

/// Winding number about the origin of a closed curve sampled at uniformly
/// spaced parameter values (the last sample connects back to the first).
///
/// # Errors
/// [`Error::Resolution`] when an unwrapped increment reaches `π/2`;
/// [`Error::GapClosure`] when a sample is zero or not finite; validation error
/// for fewer than three samples.
///
/// # Example
/// ```
/// use num_complex::Complex64;
/// use winding_rmt::winding::winding_from_samples;
/// let det: Vec<Complex64> = (0..64).map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 64.0).powu(5)).collect();
/// assert_eq!(winding_from_samples(&det).unwrap(), 5);
/// ```
pub fn winding_from_samples(det_values: &[Complex64]) -> Result<i64> {
    if det_values.len() < 3 {
        return Err(Error::Validation("at least three samples are required".into()));
    }
    let mut phases = Vec::with_capacity(det_values.len());
    for (j, v) in det_values.iter().enumerate() {
        let m = v.norm();
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::GapClosure { node: j, relative: 0.0 });
        }
        phases.push(v / m);
    }
    winding_from_phases(&phases)
}

/// Values `(a(p), b(p))` on a uniform grid of `spec.node_count` nodes,
/// precomputed once per curve, together with the curve itself for local
/// refinement.
///
/// An arc whose argument increment reaches `π/2` is bisected recursively
/// (local grid doubling) until every sub-increment is below the threshold;
/// only the offending arcs are refined, so a realisation whose curve passes
/// close to the origin costs a few dozen extra evaluations rather than a
/// globally finer grid.
#[derive(Debug, Clone)]
pub struct CurveGrid {
    curve: CurvePair,
    nodes: Vec<[Complex64; 2]>,
}

/// Maximal number of local bisections of one grid arc (arc length
/// `2π/node_count · 2^−44`, far below the gap guard's resolution).
const MAX_BISECTIONS: u32 = 44;

impl CurveGrid {
    pub fn new(curve: &CurvePair, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let m = spec.node_count;
        let nodes = (0..m)
            .map(|j| curve.nu(Complex64::from_polar(1.0, TAU * j as f64 / m as f64)))
            .collect();
        Ok(CurveGrid {
            curve: curve.clone(),
            nodes,
        })
    }

    /// Winding of `θ ↦ phase(ν(e^{iθ}))`, where `phase` returns a unit
    /// complex number (or a gap-closure error) for the curve value at node `j`.
    fn adaptive_winding(&self, phase: impl Fn([Complex64; 2], usize) -> Result<Complex64>) -> Result<i64> {
        let m = self.nodes.len();
        let h = TAU / m as f64;
        let phases = self
            .nodes
            .iter()
            .enumerate()
            .map(|(j, ab)| phase(*ab, j))
            .collect::<Result<Vec<_>>>()?;
        let mut total = 0.0;
        for j in 0..m {
            let (ua, ub) = (phases[j], phases[(j + 1) % m]);
            total += self.arc(&phase, j, j as f64 * h, (j + 1) as f64 * h, ua, ub, 0)?;
        }
        let w = total / TAU;
        let r = w.round();
        if (w - r).abs() > 1e-6 {
            return Err(Error::numerical("winding", format!("total increment {w} turns is not an integer")));
        }
        Ok(r as i64)
    }

    #[allow(clippy::too_many_arguments)]
    fn arc(
        &self,
        phase: &impl Fn([Complex64; 2], usize) -> Result<Complex64>,
        node: usize,
        ta: f64,
        tb: f64,
        ua: Complex64,
        ub: Complex64,
        depth: u32,
    ) -> Result<f64> {
        let d = increment(ua, ub);
        if d.abs() < MAX_INCREMENT {
            return Ok(d);
        }
        if depth == MAX_BISECTIONS {
            return Err(Error::Resolution { node, increment: d });
        }
        let tm = 0.5 * (ta + tb);
        let um = phase(self.curve.nu(Complex64::from_polar(1.0, tm)), node)?;
        Ok(self.arc(phase, node, ta, tm, ua, um, depth + 1)? + self.arc(phase, node, tm, tb, um, ub, depth + 1)?)
    }

    /// Winding of `p ↦ det(a(p)K₁ + b(p)K₂)`.
    pub fn winding_matrices(&self, k1: &ComplexMatrix, k2: &ComplexMatrix) -> Result<i64> {
        self.adaptive_winding(|[a, b], j| {
            let (ld, ratio) = k1.combine(a, k2, b).log_det_with_pivot_ratio();
            if ratio < GAP_GUARD || !ld.ln_abs.is_finite() {
                return Err(Error::GapClosure { node: j, relative: ratio });
            }
            Ok(ld.phase)
        })
    }

    /// Winding of `p ↦ Π_j (a(p) + b(p) z_j)`, computed as the sum of the
    /// windings of the scalar factors.
    pub fn winding_eigs(&self, eigs: &[Complex64]) -> Result<i64> {
        let mut total = 0;
        for &z in eigs {
            total += self.adaptive_winding(|[a, b], j| {
                let v = a + b * z;
                let m = v.norm();
                let relative = m / (a.norm() + b.norm() * z.norm());
                if !(relative >= GAP_GUARD) || !m.is_finite() {
                    return Err(Error::GapClosure { node: j, relative });
                }
                Ok(v / m)
            })?;
        }
        Ok(total)
    }

    /// Samples `det(a(p)K₁ + b(p)K₂)` on the grid, with angles.
    pub fn determinant_trace(&self, k1: &ComplexMatrix, k2: &ComplexMatrix) -> Vec<(f64, Complex64)> {
        let m = self.nodes.len();
        self.nodes
            .iter()
            .enumerate()
            .map(|(j, [a, b])| (TAU * j as f64 / m as f64, k1.combine(*a, k2, *b).log_det().value()))
            .collect()
    }
}

/// Winding of the determinantal curve of one realisation `(K₁, K₂)`, with
/// local grid doubling on resolution failures.
///
/// # Errors
/// Validation error for mismatched sizes; [`Error::GapClosure`] for a
/// near-singular sample; [`Error::Resolution`] after all refinements.
pub fn winding_realization_matrices(
    k1: &ComplexMatrix,
    k2: &ComplexMatrix,
    curve: &CurvePair,
    spec: &QuadratureSpec,
) -> Result<i64> {
    if k1.dim() != k2.dim() || k1.dim() == 0 {
        return Err(Error::Validation("K1 and K2 must be square of equal positive size".into()));
    }
    CurveGrid::new(curve, spec)?.winding_matrices(k1, k2)
}

/// Winding of `det K(p) ∝ Π_j (a(p) + b(p) z_j)` given the eigenvalues `z_j`
/// of `K₁⁻¹K₂`.
///
/// # Example
/// ```
/// use num_complex::Complex64;
/// use winding_rmt::curves::monomial_curve;
/// use winding_rmt::numerics::QuadratureSpec;
/// use winding_rmt::winding::winding_realization_eigs;
/// let curve = monomial_curve(1.0, 1, 1.0, 0).unwrap();
/// let eigs = vec![Complex64::new(0.0, 0.0); 4];
/// assert_eq!(winding_realization_eigs(&eigs, &curve, &QuadratureSpec::winding_default()).unwrap(), 4);
/// ```
pub fn winding_realization_eigs(eigs: &[Complex64], curve: &CurvePair, spec: &QuadratureSpec) -> Result<i64> {
    CurveGrid::new(curve, spec)?.winding_eigs(eigs)
}

/// A random-matrix ensemble that can produce single winding realisations.
pub trait Ensemble: Send + Sync {
    /// Registry name.
    fn name(&self) -> &'static str;
    /// Matrix size.
    fn n(&self) -> usize;
    /// Winding of one realisation drawn from `rng`.
    fn realization(&self, grid: &CurveGrid, rng: &mut dyn rand::RngCore) -> Result<i64>;
}

/// Independent GinUE `K₁, K₂`; windings from the matrix determinants.
#[derive(Debug, Clone, Copy)]
pub struct GinueEnsemble {
    pub n: usize,
}

impl Ensemble for GinueEnsemble {
    fn name(&self) -> &'static str {
        "ginue"
    }
    fn n(&self) -> usize {
        self.n
    }
    fn realization(&self, grid: &CurveGrid, rng: &mut dyn rand::RngCore) -> Result<i64> {
        let k1 = ginue_matrix(self.n, rng);
        let k2 = ginue_matrix(self.n, rng);
        grid.winding_matrices(&k1, &k2)
    }
}

/// Muttalib–Borodin pair; windings from eigenvalues of `K₁⁻¹K₂` drawn from the
/// `ω̂` determinantal process.
#[derive(Debug, Clone, Copy)]
pub struct MbEnsemble {
    pub weight: HatWeight,
}

impl Ensemble for MbEnsemble {
    fn name(&self) -> &'static str {
        "mb"
    }
    fn n(&self) -> usize {
        self.weight.n()
    }
    fn realization(&self, grid: &CurveGrid, rng: &mut dyn rand::RngCore) -> Result<i64> {
        let eigs = dpp_eigenvalues(&self.weight, rng)?;
        grid.winding_eigs(&eigs)
    }
}

/// Monte Carlo mean winding number over `trials` independent realisations.
///
/// Trial `t` draws from the sub-stream [`RandomStream::trial`]`(t)`, trials run
/// in parallel, and the histogram merge is order independent, so the result
/// depends only on `(curve, ensemble, trials, stream, spec)`.
///
/// # Errors
/// Configuration error when `n` differs from the ensemble size or
/// `trials < 100`; resolution and sampling failures are propagated.
pub fn mc_mean_winding(
    curve: &CurvePair,
    ensemble: &dyn Ensemble,
    n: usize,
    trials: u64,
    stream: RandomStream,
    spec: &QuadratureSpec,
) -> Result<WindingEstimate> {
    if ensemble.n() != n {
        return Err(Error::Config(format!(
            "ensemble '{}' has size {} but n = {n} was requested",
            ensemble.name(),
            ensemble.n()
        )));
    }
    if trials < 100 {
        return Err(Error::Config(format!("at least 100 trials are required, got {trials}")));
    }
    if trials > u32::MAX as u64 {
        return Err(Error::Config("trial count exceeds the sub-stream range".into()));
    }
    let grid = CurveGrid::new(curve, spec)?;
    let outcomes: Vec<Result<Option<i64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream.trial(t).rng();
            match ensemble.realization(&grid, &mut rng) {
                Ok(w) => Ok(Some(w)),
                Err(Error::GapClosure { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut histogram = BTreeMap::new();
    let mut discarded = 0;
    for o in outcomes {
        match o? {
            Some(w) => *histogram.entry(w).or_insert(0) += 1,
            None => discarded += 1,
        }
    }
    WindingEstimate::from_histogram(histogram, discarded, stream)
}

/// Draws a single pair `(K₁, K₂)` of GinUE matrices from a stream; convenient
/// for determinant traces.
pub fn ginue_pair(n: usize, stream: RandomStream) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = stream.rng();
    let k1 = ginue_matrix(n, &mut rng);
    let k2 = ginue_matrix(n, &mut rng);
    (k1, k2)
}
