//! Execution of the seven run commands.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};
use winding_rmt::asymptotics::{convergence_study, theorem2_mean};
use winding_rmt::curves::CurvePair;
use winding_rmt::gaussian_field::{grf_mc_check, grf_mean_winding, grf_partition};
use winding_rmt::numerics::{ComplexMatrix, QuadratureSpec};
use winding_rmt::partition::{gaussian_partition, mean_winding_exact, partition_general, partition_m, PartitionResult};
use winding_rmt::registry::{EnsembleParams, KernelSource, Registry};
use winding_rmt::sampling::{dpp_eigenvalues, RandomStream};
use winding_rmt::verify::run_invariant_suite;
use winding_rmt::winding::{ginue_pair, mc_mean_winding, CurveGrid, WindingEstimate};

use crate::config::{default_ensemble, validate, Command, EnsembleConfig, RunConfig, SeedRecord, TableKind};
use crate::error::CliError;
use crate::output::{Report, Table};

/// Validates the configuration and runs its command.
///
/// # Errors
/// Validation errors before any computation; numerical errors from the
/// library. Commands whose checks fail (`verify`) return a report carrying
/// the failure instead, so the table is still written.
pub fn run(config: &RunConfig, seed: &SeedRecord) -> Result<Report, CliError> {
    let v = validate(config)?;
    let registry = Registry::builtin();
    let ensemble = config.ensemble.as_ref();
    match config.command {
        Command::ExactPartition => exact_partition(v.curve.as_ref().unwrap(), config, &v.spec, v.points.as_ref().unwrap()),
        Command::MeanWinding => mean_winding(v.curve.as_ref().unwrap(), ensemble.unwrap(), &v.spec),
        Command::Asymptotic => asymptotic(v.curve.as_ref().unwrap(), ensemble.unwrap(), &v.spec),
        Command::Montecarlo => montecarlo(&registry, v.curve.as_ref().unwrap(), config, seed, &v.spec),
        Command::Grf => grf(&registry, v.curve.as_ref().unwrap(), config, seed, &v.spec, v.points.as_ref().unwrap()),
        Command::Verify => Ok(verify(seed)),
        Command::Convergence => convergence(v.curve.as_ref().unwrap(), config, &v.spec),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn partition_row(table: &mut Table, method: &str, r: &PartitionResult) {
    table.push(vec![
        method.into(),
        r.value.re.into(),
        r.value.im.into(),
        r.log_abs.into(),
        r.phase.arg().into(),
        r.condition_estimate.into(),
    ]);
}

fn exact_partition(
    curve: &CurvePair,
    config: &RunConfig,
    spec: &QuadratureSpec,
    points: &winding_rmt::partition::PointPairs,
) -> Result<Report, CliError> {
    let e = config.ensemble.as_ref().unwrap();
    let hw = e.hat_weight()?;
    let mut table = Table::new("partition", &["method", "re", "im", "log_abs", "phase", "condition_estimate"]);
    let (method, z) = if points.m2() == 0 {
        ("kernel-determinant", partition_m(curve, points, &hw)?)
    } else {
        ("block-determinant", partition_general(curve, points, &hw, spec)?)
    };
    partition_row(&mut table, method, &z);
    let mut summary = json!({ "value": complex_json(z.value), "method": method, "m1": points.m1(), "m2": points.m2() });
    if points.m2() == 0 && e.gamma == 1.0 && e.delta == 0.0 {
        let g = gaussian_partition(curve, points, e.n)?;
        partition_row(&mut table, "gaussian-closed-form", &g);
        summary["gaussian_relative_difference"] = json!((z.value - g.value).norm() / g.value.norm());
    }
    Ok(Report { summary, table, failure: None })
}

fn mean_winding(curve: &CurvePair, e: &EnsembleConfig, spec: &QuadratureSpec) -> Result<Report, CliError> {
    let exact = mean_winding_exact(curve, &e.hat_weight()?, spec)?;
    let mut table = Table::new("mean-winding", &["n", "gamma", "delta", "exact_mean"]);
    table.push(vec![e.n.into(), e.gamma.into(), e.delta.into(), exact.into()]);
    Ok(Report {
        summary: json!({ "exact_mean": exact }),
        table,
        failure: None,
    })
}

fn asymptotic(curve: &CurvePair, e: &EnsembleConfig, spec: &QuadratureSpec) -> Result<Report, CliError> {
    let b = theorem2_mean(curve, e.gamma, e.delta, e.n, spec)?;
    let mut table = Table::new("asymptotic", &["n", "leading_coefficient", "subleading_value", "assembled"]);
    table.push(vec![b.n.into(), b.leading_coefficient.into(), b.subleading_value.into(), b.assembled.into()]);
    Ok(Report {
        summary: json!({
            "leading_coefficient": b.leading_coefficient,
            "subleading_value": b.subleading_value,
            "assembled": b.assembled,
        }),
        table,
        failure: None,
    })
}

/// Splits `trials` over `streams` as evenly as possible (earlier streams take
/// the remainder).
fn split_trials(trials: u64, streams: u64) -> Vec<u64> {
    (0..streams).map(|i| trials / streams + u64::from(i < trials % streams)).collect()
}

fn montecarlo(
    registry: &Registry,
    curve: &CurvePair,
    config: &RunConfig,
    seed: &SeedRecord,
    spec: &QuadratureSpec,
) -> Result<Report, CliError> {
    let e = config.ensemble.as_ref().unwrap();
    let mc = config.mc.as_ref().unwrap();
    let name = mc.ensemble.as_deref().unwrap_or_else(|| default_ensemble(e));
    let ensemble = registry.ensemble(name, &EnsembleParams { gamma: e.gamma, delta: e.delta, n: e.n })?;
    let mut histogram = BTreeMap::new();
    let mut discarded = 0;
    for (i, t) in split_trials(mc.trials, seed.streams).into_iter().enumerate() {
        let part = mc_mean_winding(curve, ensemble.as_ref(), e.n, t, RandomStream::new(seed.seed, i as u64), spec)?;
        for (w, c) in part.histogram {
            *histogram.entry(w).or_insert(0) += c;
        }
        discarded += part.discarded;
    }
    let est = WindingEstimate::from_histogram(histogram, discarded, RandomStream::new(seed.seed, 0))?;
    let hw = e.hat_weight()?;
    let exact = mean_winding_exact(curve, &hw, spec)?;
    let z_score = if est.stderr > 0.0 { (est.mean - exact) / est.stderr } else { 0.0 };
    let summary = json!({
        "ensemble": name,
        "mean": est.mean,
        "stderr": est.stderr,
        "trials": est.trials,
        "discarded": est.discarded,
        "exact_mean": exact,
        "z_score": z_score,
        "within_3_sigma": z_score.abs() < 3.0,
        "warning": est.warning,
    });
    let table = match config.output.table {
        TableKind::Histogram => {
            let mut t = Table::new("winding-histogram", &["winding", "count"]);
            for (&w, &c) in &est.histogram {
                t.push(vec![w.into(), c.into()]);
            }
            t
        }
        TableKind::DeterminantTrace => {
            // The first trial of stream 0, i.e. the first realisation above.
            let stream = RandomStream::new(seed.seed, 0).trial(0);
            let (k1, k2) = match name {
                "ginue" => ginue_pair(e.n, stream),
                "mb" => {
                    let eigs = dpp_eigenvalues(&hw, &mut stream.rng())?;
                    let n = eigs.len();
                    (ComplexMatrix::identity(n), ComplexMatrix::from_fn(n, |i, j| if i == j { eigs[i] } else { Complex64::new(0.0, 0.0) }))
                }
                other => return Err(CliError::Validation(format!("no determinant trace for ensemble '{other}'"))),
            };
            let grid = CurveGrid::new(curve, spec)?;
            let mut t = Table::new("determinant-trace", &["theta", "re", "im"]);
            for (theta, d) in grid.determinant_trace(&k1, &k2) {
                t.push(vec![theta.into(), d.re.into(), d.im.into()]);
            }
            t
        }
    };
    Ok(Report { summary, table, failure: None })
}

fn grf(
    registry: &Registry,
    curve: &CurvePair,
    config: &RunConfig,
    seed: &SeedRecord,
    spec: &QuadratureSpec,
    points: &winding_rmt::partition::PointPairs,
) -> Result<Report, CliError> {
    let n = config.ensemble.as_ref().unwrap().n;
    let mc = config.mc.as_ref().unwrap();
    let (name, source) = match &config.kernel {
        None => ("induced", KernelSource::Curve(curve.clone())),
        Some(k) if k.name == "user-grid" => {
            let (Some(m), Some(values), Some(derivatives)) = (k.grid_size, &k.values, &k.derivatives) else {
                return Err(CliError::Validation("kernel 'user-grid' needs grid_size, values and derivatives".into()));
            };
            let cx = |v: &Vec<[f64; 2]>| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            ("user-grid", KernelSource::Grid { m, values: cx(values), derivatives: cx(derivatives) })
        }
        Some(k) => (k.name.as_str(), KernelSource::Curve(curve.clone())),
    };
    let kernel = registry.kernel(name, &source)?;
    let (p, q) = (points.p()[0], points.q()[0]);
    let closed = grf_partition(kernel.as_ref(), p, q, n)?;
    let check = grf_mc_check(kernel.as_ref(), p, q, n, mc.trials, RandomStream::new(seed.seed, 0))?;
    let mean = grf_mean_winding(kernel.as_ref(), n, spec)?;
    let within = (check.mc_value - closed).norm() < 3.0 * check.stderr;
    let mut table = Table::new("grf", &["quantity", "re", "im", "stderr"]);
    table.push(vec!["closed_form".into(), closed.re.into(), closed.im.into(), 0.0.into()]);
    table.push(vec!["monte_carlo".into(), check.mc_value.re.into(), check.mc_value.im.into(), check.stderr.into()]);
    table.push(vec!["mean_winding".into(), mean.into(), 0.0.into(), 0.0.into()]);
    Ok(Report {
        summary: json!({
            "kernel": name,
            "closed_form": complex_json(closed),
            "monte_carlo": complex_json(check.mc_value),
            "stderr": check.stderr,
            "within_3_sigma": within,
            "mean_winding": mean,
            "warning": check.warning,
        }),
        table,
        failure: None,
    })
}

fn verify(seed: &SeedRecord) -> Report {
    let results = run_invariant_suite(seed.seed);
    let mut table = Table::new("invariants", &["name", "passed", "max_error", "tolerance", "detail"]);
    for r in &results {
        table.push(vec![
            r.name.into(),
            r.passed.into(),
            r.max_error.into(),
            r.tolerance.into(),
            r.detail.as_deref().unwrap_or("").into(),
        ]);
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    let failure = (!failed.is_empty()).then(|| CliError::Numerical(format!("{} invariant(s) failed: {}", failed.len(), failed.join(", "))));
    Report {
        summary: json!({ "invariants": results.len(), "failed": failed, "all_passed": failure.is_none() }),
        table,
        failure,
    }
}

fn convergence(curve: &CurvePair, config: &RunConfig, spec: &QuadratureSpec) -> Result<Report, CliError> {
    let params = config.ensemble.as_ref().unwrap().params()?;
    let ns = &config.sweep.as_ref().unwrap().n;
    let rows = convergence_study(curve, &params, ns, spec)?;
    let mut table = Table::new("convergence", &["n", "exact", "asymptotic", "gap"]);
    for r in &rows {
        table.push(vec![r.n.into(), r.exact.into(), r.asymptotic.into(), r.gap.into()]);
    }
    // Gaps are compared up to the resolution of the computed means.
    let monotone = rows
        .windows(2)
        .all(|w| w[1].gap <= w[0].gap + spec.tolerance * w[1].exact.abs().max(1.0));
    Ok(Report {
        summary: json!({ "rows": rows.len(), "gap_non_increasing": monotone, "final_gap": rows.last().map(|r| r.gap) }),
        table,
        failure: None,
    })
}
