//! Study outcomes with their threshold checks and report writers.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::Settings;
use crate::error::CliResult;

/// A threshold a metric is judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Above(f64),
    Within { target: f64, tolerance: f64 },
}

impl Bound {
    pub fn admits(self, value: f64) -> bool {
        match self {
            Bound::AtMost(t) => value <= t,
            Bound::AtLeast(t) => value >= t,
            Bound::Above(t) => value > t,
            Bound::Within { target, tolerance } => (value - target).abs() <= tolerance,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(t) => write!(f, "<= {t}"),
            Bound::AtLeast(t) => write!(f, ">= {t}"),
            Bound::Above(t) => write!(f, "> {t}"),
            Bound::Within { target, tolerance } => write!(f, "within {tolerance} of {target}"),
        }
    }
}

/// One pass/fail flag. `criterion` is the acceptance criterion it serves.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub metric: String,
    pub value: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    /// NaN never passes.
    pub fn new(criterion: u8, metric: impl Into<String>, value: f64, bound: Bound) -> Self {
        Self {
            criterion,
            metric: metric.into(),
            value,
            bound,
            pass: bound.admits(value),
        }
    }

    /// A yes/no property recorded as 1 (holds) or 0 (violated).
    pub fn flag(criterion: u8, metric: impl Into<String>, holds: bool) -> Self {
        Self::new(
            criterion,
            metric,
            if holds { 1.0 } else { 0.0 },
            Bound::AtLeast(1.0),
        )
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {} = {} (required {})",
            self.metric,
            number(self.value),
            self.bound
        )
    }
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    metric: &'a str,
    criterion: u8,
    value: f64,
    comparison: &'static str,
    threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<f64>,
    pass: bool,
}

impl<'a> From<&'a Check> for CheckRecord<'a> {
    fn from(c: &'a Check) -> Self {
        let (comparison, threshold, target) = match c.bound {
            Bound::AtMost(t) => ("<=", t, None),
            Bound::AtLeast(t) => (">=", t, None),
            Bound::Above(t) => (">", t, None),
            Bound::Within { target, tolerance } => ("within", tolerance, Some(target)),
        };
        CheckRecord {
            metric: &c.metric,
            criterion: c.criterion,
            value: c.value,
            comparison,
            threshold,
            target,
            pass: c.pass,
        }
    }
}

/// A parameter echo cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(u64::from(v))
    }
}

impl From<&'static str> for Cell {
    fn from(v: &'static str) -> Self {
        Cell::Text(v)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => f.write_str(&number(*v)),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// Shortest round-trip text, in exponent form when plain form would be long.
pub fn number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-3..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Row {
    params: Vec<Cell>,
    metric: &'static str,
    value: f64,
    reference: Option<f64>,
}

/// Rows sharing one header: `param_*` echoes followed by `metric`, `value`,
/// `reference`, `abs_err` and `rel_err`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    params: Vec<&'static str>,
    rows: Vec<Row>,
}

impl Table {
    pub fn new(params: &[&'static str]) -> Self {
        Self {
            params: params.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        params: Vec<Cell>,
        metric: &'static str,
        value: f64,
        reference: Option<f64>,
    ) {
        assert_eq!(
            params.len(),
            self.params.len(),
            "one echo cell per parameter column"
        );
        self.rows.push(Row {
            params,
            metric,
            value,
            reference,
        });
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = self.params.iter().map(|p| format!("param_{p}")).collect();
        header.extend(["metric", "value", "reference", "abs_err", "rel_err"].map(String::from));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec: Vec<String> = r.params.iter().map(Cell::to_string).collect();
            rec.push(r.metric.to_string());
            rec.push(number(r.value));
            match r.reference {
                Some(reference) => {
                    let abs = (r.value - reference).abs();
                    rec.push(number(reference));
                    rec.push(number(abs));
                    rec.push(if reference != 0.0 {
                        number(abs / reference.abs())
                    } else {
                        String::new()
                    });
                }
                None => rec.extend([String::new(), String::new(), String::new()]),
            }
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

/// Everything a study produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub settings: Settings,
    pub table: Table,
    /// Study-specific findings echoed into the summary.
    pub results: Vec<Value>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn summary_json(&self) -> CliResult<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            study: &'static str,
            parameters: &'a Settings,
            results: &'a [Value],
            checks: Vec<CheckRecord<'a>>,
            pass: bool,
        }
        let s = Summary {
            study: self.settings.study.name(),
            parameters: &self.settings,
            results: &self.results,
            checks: self.checks.iter().map(CheckRecord::from).collect(),
            pass: self.passed(),
        };
        let mut text = serde_json::to_string_pretty(&s)?;
        text.push('\n');
        Ok(text)
    }

    /// Write `<study>.csv` and `<study>.json` into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> CliResult<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let name = self.settings.study.name();
        let csv_path = dir.join(format!("{name}.csv"));
        let json_path = dir.join(format!("{name}.json"));
        std::fs::write(&csv_path, self.table.to_csv()?)?;
        std::fs::write(&json_path, self.summary_json()?)?;
        Ok((csv_path, json_path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_reject_nan() {
        for b in [
            Bound::AtMost(1.0),
            Bound::AtLeast(0.0),
            Bound::Above(0.0),
            Bound::Within {
                target: 0.0,
                tolerance: 1.0,
            },
        ] {
            assert!(!b.admits(f64::NAN));
        }
        assert!(Bound::Within {
            target: -0.5,
            tolerance: 0.05
        }
        .admits(-0.52));
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["alpha", "n"]);
        t.push(
            vec![0.5.into(), 129usize.into()],
            "ratio",
            -0.99,
            Some(-1.0),
        );
        t.push(vec![0.5.into(), 257usize.into()], "order", 1.5, None);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "param_alpha,param_n,metric,value,reference,abs_err,rel_err"
        );
        assert!(lines[1].starts_with("0.5,129,ratio,-0.99,-1,"));
        assert_eq!(lines[2], "0.5,257,order,1.5,,,");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.0, -0.25, 1.2345e-9, 3.5e12, 0.1 + 0.2] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
    }
}
