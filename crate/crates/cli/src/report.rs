use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 11] = [
    "suite",
    "case",
    "n",
    "m",
    "c_or_r",
    "quantity",
    "value",
    "bound_or_target",
    "slack",
    "tolerance",
    "pass",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub suite: String,
    pub case: String,
    pub n: usize,
    pub m: Option<usize>,
    pub c_or_r: Option<f64>,
    pub quantity: String,
    pub value: Option<f64>,
    pub bound_or_target: Option<f64>,
    pub slack: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

/// Identifies the model a row belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct RowKey {
    pub suite: &'static str,
    pub case: String,
    pub n: usize,
    pub m: Option<usize>,
    pub c_or_r: Option<f64>,
}

impl RowKey {
    fn row(&self, quantity: &str) -> Row {
        Row {
            suite: self.suite.to_string(),
            case: self.case.clone(),
            n: self.n,
            m: self.m,
            c_or_r: self.c_or_r,
            quantity: quantity.to_string(),
            value: None,
            bound_or_target: None,
            slack: None,
            tolerance: None,
            pass: false,
        }
    }

    /// Passes when `value <= bound + tol`; slack is `bound - value`.
    pub fn upper(&self, quantity: &str, value: f64, bound: f64, tol: f64) -> Row {
        Row {
            value: Some(value),
            bound_or_target: Some(bound),
            slack: Some(bound - value),
            tolerance: Some(tol),
            pass: value <= bound + tol,
            ..self.row(quantity)
        }
    }

    /// Passes when `value >= bound - tol`; slack is `value - bound`.
    pub fn lower(&self, quantity: &str, value: f64, bound: f64, tol: f64) -> Row {
        Row {
            value: Some(value),
            bound_or_target: Some(bound),
            slack: Some(value - bound),
            tolerance: Some(tol),
            pass: value >= bound - tol,
            ..self.row(quantity)
        }
    }

    /// Passes when `|value - target| <= tol`; slack is `target - value`.
    pub fn target(&self, quantity: &str, value: f64, target: f64, tol: f64) -> Row {
        Row {
            value: Some(value),
            bound_or_target: Some(target),
            slack: Some(target - value),
            tolerance: Some(tol),
            pass: (value - target).abs() <= tol,
            ..self.row(quantity)
        }
    }

    /// A reported value with nothing to check.
    pub fn info(&self, quantity: &str, value: f64) -> Row {
        Row {
            value: Some(value),
            pass: true,
            ..self.row(quantity)
        }
    }

    /// A check that could not be evaluated.
    pub fn failure(&self, quantity: &str, reason: &str) -> Row {
        Row {
            case: format!("{} ({reason})", self.case),
            ..self.row(quantity)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub suite: String,
    pub rows: Vec<Row>,
    pub pass: bool,
    pub wall_time_s: f64,
    pub version: String,
}

impl RunReport {
    pub fn new(suite: &str, mut rows: Vec<Row>, wall_time_s: f64) -> Self {
        rows.sort_by(|a, b| (&a.suite, a.n, a.m, &a.case).cmp(&(&b.suite, b.n, b.m, &b.case)));
        let pass = rows.iter().all(|r| r.pass);
        Self {
            suite: suite.to_string(),
            rows,
            pass,
            wall_time_s,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// `{:.16e}` carries 17 significant digits, enough to round-trip any `f64`.
fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub fn to_csv(report: &RunReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in &report.rows {
        w.write_record([
            r.suite.clone(),
            r.case.clone(),
            r.n.to_string(),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            opt_float(r.c_or_r),
            r.quantity.clone(),
            opt_float(r.value),
            opt_float(r.bound_or_target),
            opt_float(r.slack),
            opt_float(r.tolerance),
            r.pass.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn json_float(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => float(v),
        _ => "null".to_string(),
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

pub fn to_json(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"suite\": {},", json_str(&report.suite));
    let _ = writeln!(out, "  \"pass\": {},", report.pass);
    let _ = writeln!(out, "  \"wall_time_s\": {},", json_float(Some(report.wall_time_s)));
    let _ = writeln!(out, "  \"version\": {},", json_str(&report.version));
    out.push_str("  \"rows\": [");
    for (i, r) in report.rows.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let _ = write!(
            out,
            "    {{\"suite\": {}, \"case\": {}, \"n\": {}, \"m\": {}, \"c_or_r\": {}, \"quantity\": {}, \
             \"value\": {}, \"bound_or_target\": {}, \"slack\": {}, \"tolerance\": {}, \"pass\": {}}}",
            json_str(&r.suite),
            json_str(&r.case),
            r.n,
            r.m.map(|m| m.to_string()).unwrap_or_else(|| "null".into()),
            json_float(r.c_or_r),
            json_str(&r.quantity),
            json_float(r.value),
            json_float(r.bound_or_target),
            json_float(r.slack),
            json_float(r.tolerance),
            r.pass
        );
    }
    out.push_str(if report.rows.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    out
}

pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Csv => to_csv(report),
        Format::Json => to_json(report),
    }
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(report: &RunReport, format: Format, path: Option<&std::path::Path>) -> std::io::Result<()> {
    let text = render(report, format);
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> RowKey {
        RowKey {
            suite: "bounds",
            case: "clifford, critical".into(),
            n: 5,
            m: Some(1),
            c_or_r: Some(0.4f64.sqrt()),
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let report = RunReport::new("bounds", vec![], 0.0);
        assert_eq!(to_csv(&report), format!("{}\n", CSV_HEADER.join(",")));
        assert!(report.pass);
    }

    #[test]
    fn row_kinds() {
        let k = key();
        assert!(k.upper("q", 1.0, 1.0, 0.0).pass);
        assert!(!k.upper("q", 1.1, 1.0, 0.05).pass);
        assert!(k.lower("q", -1e-12, 0.0, 1e-9).pass);
        assert!(!k.target("q", 0.5, 0.0, 0.1).pass);
        assert!(k.info("q", 3.0).pass);
        assert!(!k.failure("q", "no").pass);
    }

    #[test]
    fn csv_fields() {
        let report = RunReport::new("bounds", vec![key().upper("T1.4", -8.0, -8.0, 1e-9)], 0.5);
        let text = to_csv(&report);
        let mut lines = text.lines();
        lines.next();
        let line = lines.next().unwrap();
        assert!(line.starts_with("bounds,\"clifford, critical\",5,1,6.3245553203367588e-1,T1.4,-8.0000000000000000e0,"));
        assert!(line.ends_with(",true"));
    }

    #[test]
    fn json_round_trip() {
        let rows = vec![
            key().upper("T1.2", -16.329931618554518, -16.32993161855452, 1e-9),
            RowKey { m: None, c_or_r: None, ..key() }.failure("x", "did not \"converge\""),
            key().info("iterations", 3.0),
        ];
        let report = RunReport::new("all", rows, 1.25);
        let back: RunReport = serde_json::from_str(&to_json(&report)).unwrap();
        assert_eq!(back, report);
        let empty = RunReport::new("all", vec![], 0.0);
        assert_eq!(serde_json::from_str::<RunReport>(&to_json(&empty)).unwrap(), empty);
    }

    #[test]
    fn rows_are_sorted() {
        let mut a = key();
        a.n = 6;
        let b = key();
        let report = RunReport::new("x", vec![a.info("q", 1.0), b.info("q", 2.0)], 0.0);
        assert_eq!(report.rows[0].n, 5);
    }
}
