use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Exact check, recorded as `0` on success and `1` on failure.
    pub fn exact(name: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            value: if holds { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: holds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioEcho {
    pub name: String,
    pub group_orders: Vec<usize>,
}

/// Rows for the optional CSV output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub scenario: ScenarioEcho,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(flatten)]
    pub result: Value,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn new(
        command: &str,
        scenario: ScenarioEcho,
        seed: u64,
        checks: Vec<Check>,
        result: Value,
        table: Table,
    ) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            schema_version: crate::scenario::SCHEMA_VERSION,
            command: command.to_string(),
            scenario,
            seed,
            checks,
            pass,
            result,
            table,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.header)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// JSON goes to `out` (stdout without one). CSV goes next to it with a
/// `.csv` extension, or replaces the JSON on stdout.
pub fn emit(report: &Report, out: Option<&Path>, format: Format) -> Result<()> {
    match (out, format) {
        (Some(path), Format::Json) => write_file(path, &report.to_json()?),
        (Some(path), Format::Csv) => {
            let json_path = if path.extension().is_some_and(|e| e == "csv") {
                path.with_extension("json")
            } else {
                path.to_path_buf()
            };
            let csv_path: PathBuf = path.with_extension("csv");
            write_file(&json_path, &report.to_json()?)?;
            write_file(&csv_path, &report.to_csv()?)
        }
        (None, format) => {
            let text = match format {
                Format::Json => report.to_json()?,
                Format::Csv => report.to_csv()?,
            };
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
