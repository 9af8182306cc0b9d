//! Result tables and their JSON / CSV serialisation.
//!
//! Both formats carry the same payload: library version, echoed
//! configuration, seed record, summary and table. Nothing time-dependent is
//! written, so identical inputs give byte-identical files.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig, SeedRecord};
use crate::error::CliError;

/// Version string recorded in every result.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// A named table whose schema identifies its column layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub schema: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &'static str, columns: &[&'static str]) -> Self {
        Table {
            schema,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Outcome of a command: summary values plus a table.
#[derive(Debug, Clone)]
pub struct Report {
    pub summary: Value,
    pub table: Table,
    /// Set when the command ran but its checks did not all pass.
    pub failure: Option<CliError>,
}

/// Renders a report in the requested format.
pub fn render(report: &Report, config: &RunConfig, seed: &SeedRecord, format: Format) -> Result<Vec<u8>, CliError> {
    let config_json = serde_json::to_value(config).map_err(|e| CliError::Io(e.to_string()))?;
    match format {
        Format::Json => {
            let doc = json!({
                "version": VERSION,
                "config": config_json,
                "seed_record": seed,
                "summary": report.summary,
                "table": report.table,
            });
            let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = Vec::new();
            let header = |out: &mut Vec<u8>, key: &str, v: String| writeln!(out, "# {key}: {v}");
            (|| -> std::io::Result<()> {
                header(&mut out, "schema", report.table.schema.to_string())?;
                header(&mut out, "version", VERSION.to_string())?;
                header(&mut out, "config", config_json.to_string())?;
                header(&mut out, "seed_record", serde_json::to_string(seed).unwrap_or_default())?;
                header(&mut out, "summary", report.summary.to_string())?;
                Ok(())
            })()
            .map_err(|e| CliError::Io(e.to_string()))?;
            let mut w = csv::Writer::from_writer(out);
            let io = |e: csv::Error| CliError::Io(e.to_string());
            w.write_record(&report.table.columns).map_err(io)?;
            for row in &report.table.rows {
                w.write_record(row.iter().map(Cell::csv_field)).map_err(io)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
