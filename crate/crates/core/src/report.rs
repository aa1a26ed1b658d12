//! Ratio reports: one row per instance, a summary, CSV or JSON output.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::metric::EPS;
use crate::numfmt::g17;

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    /// Seed that regenerates the instance.
    pub id: u64,
    pub policy: String,
    pub alg: f64,
    pub opt: f64,
    pub ratio: f64,
}

impl RatioRow {
    pub fn new(id: u64, policy: impl Into<String>, alg: f64, opt: f64) -> Self {
        Self { id, policy: policy.into(), alg, opt, ratio: ratio(alg, opt) }
    }

    /// `alg <= bound * opt + EPS`.
    pub fn within(&self, bound: f64) -> bool {
        self.alg <= bound * self.opt + EPS
    }
}

/// `alg / opt`, with `0 / 0` read as 1.
pub fn ratio(alg: f64, opt: f64) -> f64 {
    if opt <= 0.0 {
        if alg <= EPS {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        alg / opt
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub max: f64,
    pub mean: f64,
    pub bound: Option<f64>,
    /// True when every row is within the bound (or no bound was given).
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RatioReport {
    /// Generation parameters, in order, for provenance.
    pub params: Vec<(String, String)>,
    pub rows: Vec<RatioRow>,
    pub bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown report format: {s} (expected csv or json)")),
        }
    }
}

impl RatioReport {
    pub fn summary(&self) -> Summary {
        let max = self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        let mean = if self.rows.is_empty() {
            0.0
        } else {
            self.rows.iter().map(|r| r.ratio).sum::<f64>() / self.rows.len() as f64
        };
        let pass = self.bound.is_none_or(|b| self.rows.iter().all(|r| r.within(b)));
        Summary { max, mean, bound: self.bound, pass }
    }

    /// Rows over the bound.
    pub fn violations(&self) -> Vec<&RatioRow> {
        match self.bound {
            Some(b) => self.rows.iter().filter(|r| !r.within(b)).collect(),
            None => vec![],
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "# {}", p.join(" ")).unwrap();
        }
        out.push_str("id,policy,alg,opt,ratio\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{}", r.id, r.policy, g17(r.alg), g17(r.opt), g17(r.ratio)).unwrap();
        }
        let s = self.summary();
        let bound = s.bound.map_or("none".to_string(), g17);
        writeln!(out, "# summary max={} mean={} bound={} pass={}", g17(s.max), g17(s.mean), bound, s.pass).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| json!({"id": r.id, "policy": r.policy, "alg": num(r.alg), "opt": num(r.opt), "ratio": num(r.ratio)}))
            .collect();
        let s = self.summary();
        let doc = json!({
            "params": params,
            "rows": rows,
            "summary": {"max": num(s.max), "mean": num(s.mean), "bound": s.bound.map(num), "pass": s.pass},
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("plain JSON values");
        text.push('\n');
        text
    }
}

/// JSON has no infinities; they become strings.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(g17(x)), Value::Number)
}
