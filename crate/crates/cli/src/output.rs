use std::io::Write;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Tabular result of one command plus its descriptive header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub command: String,
    /// Provenance of the run: topology, squeezing, readout, units, hash.
    pub metadata: Vec<(String, String)>,
    /// Scalar results such as peak positions or the crossover frequency.
    pub summary: Vec<(String, Value)>,
    pub warnings: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            metadata: vec![(
                "tool".into(),
                format!("tsr-sim {}", env!("CARGO_PKG_VERSION")),
            )],
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn summary_value(&self, key: &str) -> Option<&Value> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Human-readable summary, one `key = value` per line.
    pub fn summary_text(&self) -> String {
        self.summary
            .iter()
            .map(|(k, v)| format!("{k} = {}\n", plain(v)))
            .collect()
    }
}

/// SHA-256 over the physics part of a configuration (output settings excluded).
pub fn parameter_hash(cfg: &RunConfig) -> String {
    let mut physics = cfg.clone();
    physics.output = Default::default();
    hex::encode(Sha256::digest(physics.to_json_string().as_bytes()))
}

pub fn write_report<W: Write>(report: &Report, format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(report, out),
        Format::Json => write_json(report, out),
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv<W: Write>(report: &Report, mut out: W) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Output(e.to_string());
    writeln!(out, "# command: {}", report.command).map_err(io)?;
    for (k, v) in &report.metadata {
        writeln!(out, "# {k}: {v}").map_err(io)?;
    }
    for (k, v) in &report.summary {
        writeln!(out, "# {k}: {}", plain(v)).map_err(io)?;
    }
    let mut w = csv::Writer::from_writer(out);
    if !report.columns.is_empty() {
        w.write_record(&report.columns)?;
    }
    for row in &report.rows {
        w.write_record(row.iter().map(|x| format!("{x:.16e}")))?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

fn write_json<W: Write>(report: &Report, mut out: W) -> Result<(), CliError> {
    let metadata: Map<String, Value> = report
        .metadata
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let summary: Map<String, Value> = report.summary.iter().cloned().collect();
    let doc = json!({
        "command": report.command,
        "metadata": metadata,
        "summary": summary,
        "warnings": report.warnings,
        "columns": report.columns,
        "rows": report.rows,
    });
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::Output(e.to_string()))
}
