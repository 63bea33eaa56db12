//! Versioned CSV and JSON output for reports, sweeps and traces.

use crate::error::{Error, Result};
use crate::verifiers::InequalityReport;
use serde_json::{Map, Number, Value};
use std::io::Write;

/// First line of every CSV file.
pub const SCHEMA_HEADER: &str = "# heavytail-ineq schema=1";

/// 17 significant digits, which round-trips every `f64`.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Real(f64),
    Int(i64),
    Bool(bool),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Real(x) => format_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            // non-finite values keep their CSV spelling
            Cell::Real(x) => match Number::from_f64(*x) {
                Some(n) => Value::Number(n),
                None => Value::String(format_f64(*x)),
            },
            Cell::Int(i) => Value::Number((*i).into()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A header plus rows, written either as CSV or as a JSON array of objects.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::ConfigError(format!(
                "row has {} cells for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{SCHEMA_HEADER}").map_err(io_error)?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(csv_error)?;
        }
        w.flush().map_err(io_error)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::ConfigError(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_json()).map_err(|e| Error::ConfigError(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::ConfigError(format!("write failed: {e}"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::ConfigError(format!("write failed: {e}"))
}

pub const REPORT_COLUMNS: [&str; 8] = [
    "spec_id",
    "fn_id",
    "lhs",
    "rhs",
    "slack",
    "rel_slack",
    "quad_err",
    "verdict",
];

pub fn report_table(reports: &[InequalityReport]) -> Table {
    let mut t = Table::new(&REPORT_COLUMNS);
    for r in reports {
        t.rows.push(vec![
            r.spec_id.as_str().into(),
            r.fn_id.as_str().into(),
            r.lhs.into(),
            r.rhs.into(),
            r.slack.into(),
            r.relative_slack.into(),
            r.quad_err.into(),
            r.verdict.to_string().into(),
        ]);
    }
    t
}
