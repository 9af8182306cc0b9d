//! Run configuration: JSON schema, parsing and up-front validation.
//!
//! Every numeric field is checked against the preconditions of the library
//! operation that consumes it before any computation starts, so a bad
//! configuration fails fast with exit code 3 instead of midway through a run.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use winding_rmt::curves::{example_curve, validate_curve, CurvePair, LaurentPolynomial};
use winding_rmt::numerics::QuadratureSpec;
use winding_rmt::partition::PointPairs;
use winding_rmt::polya::{HatWeight, MBParams};

use crate::error::CliError;

/// Environment variable overriding `mc.seed`.
pub const SEED_ENV: &str = "WINDING_RMT_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ExactPartition,
    MeanWinding,
    Asymptotic,
    Montecarlo,
    Grf,
    Verify,
    Convergence,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub gamma: f64,
    pub delta: f64,
    pub n: usize,
}

/// One Laurent term `(re + i·im) p^power`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub power: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Either a named preset (`"example"`) or explicit coefficient lists.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Term>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Term>>,
}

/// Point lists in turns (fractions of a full circle).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsConfig {
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub q: Vec<f64>,
    #[serde(default)]
    pub p_tilde: Vec<f64>,
    #[serde(default)]
    pub q_tilde: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Independent base streams; trials are split evenly across them.
    #[serde(default = "one")]
    pub streams: u64,
    /// Registry ensemble name; defaults to `ginue` at `γ = 1, δ = 0` and `mb`
    /// otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<String>,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let d = QuadratureSpec::default();
        QuadratureConfig {
            nodes: d.node_count,
            tolerance: d.tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Which table the `montecarlo` command writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    /// Counts per winding number.
    #[default]
    Histogram,
    /// `det K(p)` along the circle for the first realisation.
    DeterminantTrace,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub table: TableKind,
}

/// Covariance kernel for the `grf` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub name: String,
    /// Grid size `M` of a `user-grid` kernel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    /// Row-major `[re, im]` values `C(p_j, p_l)` of a `user-grid` kernel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<[f64; 2]>>,
    /// Row-major `[re, im]` first-slot derivatives of a `user-grid` kernel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivatives: Option<Vec<[f64; 2]>>,
}

/// Matrix sizes of a `convergence` sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<PointsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// Where the effective seed came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Config,
    Environment,
    Default,
}

/// Seed actually used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub streams: u64,
    pub source: SeedSource,
}

/// Parses a configuration document.
///
/// # Errors
/// [`CliError::Parse`] for malformed JSON, unknown fields or wrong types.
pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("configuration: {e}")))
}

/// Resolves the effective seed from the configuration and the environment
/// override (`env` is the value of [`SEED_ENV`], if set).
///
/// # Errors
/// [`CliError::Parse`] when the override is not an unsigned integer.
pub fn resolve_seed(config: &RunConfig, env: Option<&str>) -> Result<SeedRecord, CliError> {
    let streams = config.mc.as_ref().map_or(1, |m| m.streams);
    if let Some(v) = env {
        let seed = v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("{SEED_ENV} = '{v}' is not an unsigned integer")))?;
        return Ok(SeedRecord {
            seed,
            streams,
            source: SeedSource::Environment,
        });
    }
    Ok(match &config.mc {
        Some(mc) => SeedRecord {
            seed: mc.seed,
            streams,
            source: SeedSource::Config,
        },
        None => SeedRecord {
            seed: 0,
            streams,
            source: SeedSource::Default,
        },
    })
}

fn required<'a, T>(field: &'a Option<T>, name: &str, command: Command) -> Result<&'a T, CliError> {
    field
        .as_ref()
        .ok_or_else(|| CliError::Validation(format!("command '{}' requires the '{name}' section", command_name(command))))
}

pub fn command_name(c: Command) -> &'static str {
    match c {
        Command::ExactPartition => "exact-partition",
        Command::MeanWinding => "mean-winding",
        Command::Asymptotic => "asymptotic",
        Command::Montecarlo => "montecarlo",
        Command::Grf => "grf",
        Command::Verify => "verify",
        Command::Convergence => "convergence",
    }
}

fn polynomial(terms: &[Term], label: &str) -> Result<LaurentPolynomial, CliError> {
    for (i, t) in terms.iter().enumerate() {
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(CliError::Validation(format!("curve.{label}[{i}] has a non-finite coefficient")));
        }
    }
    Ok(LaurentPolynomial::new(terms.iter().map(|t| (t.power, Complex64::new(t.re, t.im)))))
}

impl CurveConfig {
    /// Builds and validates the curve pair.
    pub fn build(&self) -> Result<CurvePair, CliError> {
        match (&self.preset, &self.a, &self.b) {
            (Some(name), None, None) => match name.as_str() {
                "example" => Ok(example_curve()),
                other => Err(CliError::Validation(format!("unknown curve preset '{other}' (known: example)"))),
            },
            (None, Some(a), Some(b)) => {
                let (a, b) = (polynomial(a, "a")?, polynomial(b, "b")?);
                if a.is_zero() && b.is_zero() {
                    return Err(CliError::Validation("curve.a and curve.b are both zero".into()));
                }
                Ok(validate_curve(a, b)?)
            }
            _ => Err(CliError::Validation("curve needs either 'preset' or both 'a' and 'b'".into())),
        }
    }
}

impl EnsembleConfig {
    pub fn params(&self) -> Result<MBParams, CliError> {
        Ok(MBParams::new(self.gamma, self.delta)?)
    }

    pub fn hat_weight(&self) -> Result<HatWeight, CliError> {
        if self.n == 0 {
            return Err(CliError::Validation("ensemble.n must be positive".into()));
        }
        Ok(HatWeight::new(self.params()?, self.n)?)
    }
}

impl PointsConfig {
    pub fn build(&self) -> Result<PointPairs, CliError> {
        for (label, v) in [("p", &self.p), ("q", &self.q), ("p_tilde", &self.p_tilde), ("q_tilde", &self.q_tilde)] {
            if let Some(i) = v.iter().position(|t| !t.is_finite()) {
                return Err(CliError::Validation(format!("points.{label}[{i}] is not finite")));
            }
        }
        Ok(PointPairs::from_turns(&self.p, &self.q, &self.p_tilde, &self.q_tilde)?)
    }
}

impl QuadratureConfig {
    pub fn spec(&self) -> Result<QuadratureSpec, CliError> {
        let max_refinements = QuadratureSpec::default().max_refinements;
        Ok(QuadratureSpec::new(self.nodes, self.tolerance, max_refinements)?)
    }
}

/// Default ensemble name for the given parameters.
pub fn default_ensemble(e: &EnsembleConfig) -> &'static str {
    if e.gamma == 1.0 && e.delta == 0.0 {
        "ginue"
    } else {
        "mb"
    }
}

/// Validated inputs of a run.
pub struct Validated {
    pub curve: Option<CurvePair>,
    pub points: Option<PointPairs>,
    pub spec: QuadratureSpec,
}

/// Checks every section the command consumes.
///
/// # Errors
/// [`CliError::Validation`] naming the first offending field.
pub fn validate(config: &RunConfig) -> Result<Validated, CliError> {
    let cmd = config.command;
    let spec = config.quadrature.spec()?;
    let needs_curve = !matches!(cmd, Command::Verify);
    let curve = if needs_curve {
        Some(required(&config.curve, "curve", cmd)?.build()?)
    } else {
        None
    };
    if !matches!(cmd, Command::Verify) {
        let e = required(&config.ensemble, "ensemble", cmd)?;
        e.hat_weight()?;
    }
    let mut points = None;
    match cmd {
        Command::ExactPartition => {
            let p = required(&config.points, "points", cmd)?.build()?;
            if p.m1() + p.m2() == 0 {
                return Err(CliError::Validation("exact-partition needs at least one point pair".into()));
            }
            points = Some(p);
        }
        Command::Grf => {
            let p = required(&config.points, "points", cmd)?.build()?;
            if p.m1() != 1 || p.m2() != 0 {
                return Err(CliError::Validation("grf takes exactly one pair (points.p, points.q) and no conjugated points".into()));
            }
            required(&config.mc, "mc", cmd)?;
            points = Some(p);
        }
        Command::Montecarlo => {
            let mc = required(&config.mc, "mc", cmd)?;
            if mc.streams == 0 {
                return Err(CliError::Validation("mc.streams must be positive".into()));
            }
            if mc.trials < 100 * mc.streams {
                return Err(CliError::Validation(format!(
                    "mc.trials = {} must be at least 100 per stream ({} streams)",
                    mc.trials, mc.streams
                )));
            }
        }
        Command::Convergence => {
            let s = required(&config.sweep, "sweep", cmd)?;
            if s.n.is_empty() || s.n.contains(&0) {
                return Err(CliError::Validation("sweep.n must be a non-empty list of positive sizes".into()));
            }
        }
        Command::MeanWinding | Command::Asymptotic | Command::Verify => {}
    }
    if config.output.table == TableKind::DeterminantTrace && cmd != Command::Montecarlo {
        return Err(CliError::Validation("output.table = determinant-trace applies to montecarlo only".into()));
    }
    Ok(Validated { curve, points, spec })
}
