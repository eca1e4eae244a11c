use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const SCHEMA: &str = "quasifold.report/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Table,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn of(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Self { name: name.into(), status, value: None, tol: None, detail: None, counterexample: None }
    }

    /// Passes iff `value < tol`.
    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        let mut c = Self::new(name, Status::of(value < tol));
        c.value = Some(value);
        c.tol = Some(tol);
        c
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn counterexample(mut self, v: impl Serialize) -> Self {
        self.counterexample = serde_json::to_value(v).ok().filter(|v| !v.is_null());
        self
    }
}

/// Rows printed after the checks in table output.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: Value,
    pub status: Status,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: String, config: Value) -> Self {
        Self {
            schema: SCHEMA,
            command,
            config,
            status: Status::Pass,
            checks: Vec::new(),
            data: Value::Null,
            timing_ms: None,
            table: None,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn set_data(&mut self, data: impl Serialize) -> Result<(), CliError> {
        self.data = serde_json::to_value(data).map_err(|e| CliError::Internal(e.to_string()))?;
        Ok(())
    }

    /// Worst check status; a report without checks fails.
    pub fn finish(&mut self) {
        self.status = self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Fail);
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| CliError::Internal(e.to_string()))
            }
            Format::Table => Ok(self.render_table()),
            Format::Csv => self.render_csv(),
        }
    }

    fn check_rows(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    c.name.clone(),
                    c.status.label().to_string(),
                    c.value.map(|v| format!("{v:.3e}")).unwrap_or_default(),
                    c.tol.map(|v| format!("{v:.0e}")).unwrap_or_default(),
                    c.detail.clone().unwrap_or_default(),
                ]
            })
            .collect()
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "status:  {}", self.status.label());
        out.push('\n');
        let headers = ["check", "status", "value", "tol", "detail"].map(String::from).to_vec();
        aligned(&mut out, &headers, &self.check_rows());
        if let Some(t) = &self.table {
            out.push('\n');
            aligned(&mut out, &t.headers, &t.rows);
        }
        out
    }

    fn render_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Internal(e.to_string());
        w.write_record(["check", "status", "value", "tol", "detail"]).map_err(err)?;
        for row in self.check_rows() {
            w.write_record(&row).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }
}

fn aligned(out: &mut String, headers: &[String], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> =
            cells.iter().zip(&widths).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        padded.join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(headers));
    let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    for r in rows {
        let _ = writeln!(out, "{}", line(r));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("rotation".into(), Value::Null);
        r.push(Check::below("λ error", 1e-15, 1e-12));
        r.push(Check::new("probe", Status::Inconclusive).detail("bound, reached"));
        r.finish();
        r
    }

    #[test]
    fn worst_status_wins() {
        assert_eq!(sample().status, Status::Inconclusive);
        let mut r = sample();
        r.push(Check::below("bad", 1.0, 0.5));
        r.finish();
        assert_eq!(r.status.exit_code(), 1);
        let mut empty = Report::new("x".into(), Value::Null);
        empty.finish();
        assert_eq!(empty.status, Status::Fail);
    }

    #[test]
    fn formats() {
        let r = sample();
        let json: Value = serde_json::from_str(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(json["schema"], SCHEMA);
        assert_eq!(json["checks"][1]["status"], "inconclusive");
        let table = r.render(Format::Table).unwrap();
        assert!(table.contains("λ error  pass"), "{table}");
        let csv = r.render(Format::Csv).unwrap();
        assert!(csv.contains("\"bound, reached\""), "{csv}");
    }
}
