//! Machine-readable output: one JSON record per invocation, or CSV for
//! tabular results.

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// The JSON document printed on standard output. Object keys come out
/// sorted because `serde_json::Map` is ordered.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub timing_ms: f64,
}

impl OutputRecord {
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("record is plain data");
        let mut s = serde_json::to_string_pretty(&value).expect("record is plain data");
        s.push('\n');
        s
    }
}

/// Rows for `--format csv`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::validation(format!("csv output: {e}"));
        w.write_record(&self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row).map_err(fail)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::validation(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
    }
}

/// Formats a float exactly as the JSON serializer would.
pub fn float_cell(x: f64) -> String {
    serde_json::to_string(&x).expect("float serializes")
}

pub fn opt_cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
