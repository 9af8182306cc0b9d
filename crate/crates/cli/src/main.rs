//! `winding-rmt` — configuration-driven front end for exact partition
//! functions, mean winding numbers, Monte Carlo checks, asymptotics and the
//! invariant suite.
//!
//! ```text
//! winding-rmt --config run.json [--output result.csv] [--threads 8]
//! winding-rmt plot-script result.csv [--output plot.py]
//! ```
//!
//! Exit codes: 0 success, 2 configuration parse error, 3 validation error,
//! 4 numerical failure (including failed invariants), 1 output I/O failure.

mod commands;
mod config;
mod error;
mod output;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Format, SEED_ENV};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "winding-rmt", version, about = "Winding numbers of determinantal curves in random two-matrix models")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Sub>,
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Result file (overrides `output.path`; standard output when neither is set).
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Worker threads for Monte Carlo trials (affects speed only).
    #[arg(long, value_name = "K")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Writes a plotting script for a saved CSV result.
    PlotScript {
        /// CSV result file.
        result: PathBuf,
        /// Script path (defaults to the result path with a `.py` extension).
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

fn format_for(path: Option<&Path>, configured: Format) -> Format {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        _ => configured,
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Parse("--config PATH is required (or use the plot-script subcommand)".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut config = config::parse(&text)?;
    if let Some(out) = &cli.output {
        config.output.path = Some(out.to_string_lossy().into_owned());
    }
    let env_seed = std::env::var(SEED_ENV).ok();
    let seed = config::resolve_seed(&config, env_seed.as_deref())?;
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    }
    let out_path = config.output.path.as_ref().map(PathBuf::from);
    config.output.format = format_for(out_path.as_deref(), config.output.format);
    let format = config.output.format;
    let report = commands::run(&config, &seed)?;
    let bytes = output::render(&report, &config, &seed, format)?;
    match &out_path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    report.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Some(Sub::PlotScript { result, output }) => plot::emit_plot_script(result, output.as_deref()).map(|p| println!("{}", p.display())),
        None => run(&cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
