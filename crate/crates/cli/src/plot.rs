//! Plotting-script emission for saved CSV results.
//!
//! The generated Python scripts only read the CSV they were made for; no
//! numerical work is embedded.

use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Table schemas that have a plot recipe.
const PLOTTABLE: [&str; 3] = ["winding-histogram", "convergence", "determinant-trace"];

/// Reads the `# schema:` header of a CSV result.
///
/// # Errors
/// [`CliError::Validation`] when the file cannot be read or carries no
/// recognised plottable schema.
pub fn detect_schema(text: &str) -> Result<&'static str, CliError> {
    let schema = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# schema:"))
        .map(str::trim)
        .ok_or_else(|| CliError::Validation("result file has no '# schema:' header (plot scripts are generated from CSV results)".into()))?;
    PLOTTABLE
        .iter()
        .find(|&&s| s == schema)
        .copied()
        .ok_or_else(|| CliError::Validation(format!("schema '{schema}' has no plot recipe (plottable: {})", PLOTTABLE.join(", "))))
}

fn reader_prelude(csv_expr: &str) -> String {
    format!(
        r##"#!/usr/bin/env python3
import csv
from pathlib import Path

import matplotlib.pyplot as plt

CSV_PATH = {csv_expr}


def load_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    header, body = rows[0], rows[1:]
    return {{name: [float(r[i]) for r in body] for i, name in enumerate(header)}}


cols = load_columns(CSV_PATH)
fig, ax = plt.subplots()
"##
    )
}

fn body(schema: &str) -> &'static str {
    match schema {
        "winding-histogram" => {
            r#"total = sum(cols["count"])
ax.bar(cols["winding"], [c / total for c in cols["count"]], width=0.8)
ax.set_xlabel("winding number")
ax.set_ylabel("relative frequency")
ax.set_title("Winding-number histogram")
"#
        }
        "convergence" => {
            r#"pairs = [(n, g) for n, g in zip(cols["n"], cols["gap"]) if g > 0]
ax.semilogy([p[0] for p in pairs], [p[1] for p in pairs], marker="o")
ax.set_xlabel("N")
ax.set_ylabel("|exact mean - two-term expansion|")
ax.set_title("Convergence of the large-N expansion")
"#
        }
        _ => {
            r#"xs = cols["re"] + cols["re"][:1]
ys = cols["im"] + cols["im"][:1]
ax.plot(xs, ys, lw=1.0)
ax.plot([0.0], [0.0], marker="x", color="red", ms=8, label="origin")
ax.set_aspect("equal", adjustable="datalim")
ax.set_xlabel("Re det K(p)")
ax.set_ylabel("Im det K(p)")
ax.set_title("Determinantal curve")
ax.legend()
"#
        }
    }
}

/// Builds the script text for a result file located at `csv_path`, to be
/// written to `script_path`.
pub fn script_text(schema: &str, csv_path: &Path, script_path: &Path) -> String {
    let same_dir = csv_path.parent().map(Path::to_path_buf).unwrap_or_default()
        == script_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let file_name = csv_path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let csv_expr = if same_dir {
        format!("Path(__file__).resolve().parent / {file_name:?}")
    } else {
        let abs = std::fs::canonicalize(csv_path).unwrap_or_else(|_| csv_path.to_path_buf());
        format!("Path({:?})", abs.to_string_lossy())
    };
    format!("{}{}fig.tight_layout()\nplt.show()\n", reader_prelude(&csv_expr), body(schema))
}

/// Default script location: the result path with a `.py` extension.
pub fn default_script_path(result: &Path) -> PathBuf {
    result.with_extension("py")
}

/// Writes the plotting script for `result` and returns its path.
///
/// # Errors
/// [`CliError::Validation`] for a missing file or unrecognised schema;
/// [`CliError::Io`] when the script cannot be written.
pub fn emit_plot_script(result: &Path, script: Option<&Path>) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(result)
        .map_err(|e| CliError::Validation(format!("cannot read result file {}: {e}", result.display())))?;
    let schema = detect_schema(&text)?;
    let out = script.map_or_else(|| default_script_path(result), Path::to_path_buf);
    std::fs::write(&out, script_text(schema, result, &out)).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    Ok(out)
}
