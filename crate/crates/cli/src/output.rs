use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::args::OutputFormat;
use crate::CliError;

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// A command result: always a JSON document, optionally a primary table
/// used for CSV output.
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
}

impl Report {
    pub fn json(json: Value) -> Self {
        Report { json, table: None }
    }
}

fn to_csv(report: &Report) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    match &report.table {
        Some(t) => {
            w.write_record(&t.headers).map_err(io)?;
            for row in &t.rows {
                w.write_record(row).map_err(io)?;
            }
        }
        None => {
            w.write_record(["key", "value"]).map_err(io)?;
            if let Value::Object(map) = &report.json {
                for (k, v) in map {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    w.write_record([k.as_str(), v.as_str()]).map_err(io)?;
                }
            }
        }
    }
    w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))
}

pub fn emit(report: &Report, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    let bytes = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("json values serialize");
            s.push('\n');
            s.into_bytes()
        }
        OutputFormat::Csv => to_csv(report)?,
    };
    match out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| CliError::Config(format!("--out {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::Config(format!("stdout: {e}")))
        }
    }
}
