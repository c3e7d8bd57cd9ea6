//! The structured report written by every estimator subcommand.
//!
//! JSON field order is the declaration order below. The CSV form is a
//! two-column `field,value` table with one line per scalar; vectors expand
//! to `name[i]` lines and absent optional fields are omitted.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub path: String,
    pub n_rows: usize,
    pub n_cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub alpha: Option<usize>,
    pub gamma: Option<f64>,
    pub repetitions: Option<usize>,
    pub lambda: Option<f64>,
    pub constants: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleValues {
    pub per_row: Vec<f64>,
    pub total: f64,
    pub max: f64,
}

/// Mean and maximum of `|ln(approx/exact)|` over the estimated quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub mean_abs_log_ratio: f64,
    pub max_abs_log_ratio: f64,
    pub compared: usize,
}

impl ErrorMetrics {
    /// Pairs where either side is zero are skipped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Option<Self> {
        let logs: Vec<f64> = pairs
            .into_iter()
            .filter(|(a, e)| *a > 0.0 && *e > 0.0)
            .map(|(a, e)| (a / e).ln().abs())
            .collect();
        if logs.is_empty() {
            return None;
        }
        Some(Self {
            mean_abs_log_ratio: logs.iter().sum::<f64>() / logs.len() as f64,
            max_abs_log_ratio: logs.iter().copied().fold(0.0, f64::max),
            compared: logs.len(),
        })
    }
}

/// One point of the accuracy-versus-α series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub alpha: usize,
    pub mean_abs_log_ratio: f64,
    pub max_abs_log_ratio: f64,
    pub oracle_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub leave_one_out: Vec<f64>,
    pub target_column: Option<usize>,
    pub opt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub phase: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub command: String,
    pub input: InputDescriptor,
    pub p: f64,
    pub method: String,
    pub config: ConfigEcho,
    pub per_row: Option<Vec<f64>>,
    pub total: Option<f64>,
    pub max: Option<f64>,
    pub oracle: Option<OracleValues>,
    pub metrics: Option<ErrorMetrics>,
    pub series: Option<Vec<SeriesPoint>>,
    pub regression: Option<Regression>,
    pub diagnostics: BTreeMap<String, f64>,
    pub timings: Vec<Timing>,
}

impl SensitivityReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("field,value\n");
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k},{v}");
        };
        put("command", self.command.clone());
        put("input.path", csv_escape(&self.input.path));
        put("input.n_rows", self.input.n_rows.to_string());
        put("input.n_cols", self.input.n_cols.to_string());
        put("p", self.p.to_string());
        put("method", self.method.clone());
        put("config.seed", self.config.seed.to_string());
        if let Some(a) = self.config.alpha {
            put("config.alpha", a.to_string());
        }
        if let Some(g) = self.config.gamma {
            put("config.gamma", g.to_string());
        }
        if let Some(r) = self.config.repetitions {
            put("config.repetitions", r.to_string());
        }
        if let Some(l) = self.config.lambda {
            put("config.lambda", l.to_string());
        }
        for (k, v) in &self.config.constants {
            put(&format!("config.constants.{k}"), v.to_string());
        }
        if let Some(rows) = &self.per_row {
            for (i, v) in rows.iter().enumerate() {
                put(&format!("per_row[{i}]"), v.to_string());
            }
        }
        if let Some(t) = self.total {
            put("total", t.to_string());
        }
        if let Some(m) = self.max {
            put("max", m.to_string());
        }
        if let Some(o) = &self.oracle {
            for (i, v) in o.per_row.iter().enumerate() {
                put(&format!("oracle.per_row[{i}]"), v.to_string());
            }
            put("oracle.total", o.total.to_string());
            put("oracle.max", o.max.to_string());
        }
        if let Some(m) = &self.metrics {
            put("metrics.mean_abs_log_ratio", m.mean_abs_log_ratio.to_string());
            put("metrics.max_abs_log_ratio", m.max_abs_log_ratio.to_string());
            put("metrics.compared", m.compared.to_string());
        }
        if let Some(series) = &self.series {
            for (i, s) in series.iter().enumerate() {
                put(&format!("series[{i}].alpha"), s.alpha.to_string());
                put(&format!("series[{i}].mean_abs_log_ratio"), s.mean_abs_log_ratio.to_string());
                put(&format!("series[{i}].max_abs_log_ratio"), s.max_abs_log_ratio.to_string());
                put(&format!("series[{i}].oracle_calls"), s.oracle_calls.to_string());
            }
        }
        if let Some(r) = &self.regression {
            for (i, v) in r.leave_one_out.iter().enumerate() {
                put(&format!("regression.leave_one_out[{i}]"), v.to_string());
            }
            if let Some(c) = r.target_column {
                put("regression.target_column", c.to_string());
            }
            if let Some(o) = r.opt {
                put("regression.opt", o.to_string());
            }
        }
        for (k, v) in &self.diagnostics {
            put(&format!("diagnostics.{k}"), v.to_string());
        }
        for t in &self.timings {
            put(&format!("timings.{}", t.phase), t.seconds.to_string());
        }
        out
    }

    /// Human-readable summary for the terminal.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} | input {} ({}x{}) | p = {} | method {} | seed {}",
            self.command, self.input.path, self.input.n_rows, self.input.n_cols, self.p, self.method, self.config.seed
        );
        if let Some(rows) = &self.per_row {
            let shown = rows.len().min(10);
            let _ = writeln!(s, "  {:>6}  {:>14}  {:>14}", "row", "estimate", "exact");
            for (i, v) in rows.iter().take(shown).enumerate() {
                let exact = self
                    .oracle
                    .as_ref()
                    .map(|o| format!("{:14.6e}", o.per_row[i]))
                    .unwrap_or_else(|| format!("{:>14}", "-"));
                let _ = writeln!(s, "  {i:>6}  {v:14.6e}  {exact}");
            }
            if rows.len() > shown {
                let _ = writeln!(s, "  ... {} more rows", rows.len() - shown);
            }
        }
        if let Some(t) = self.total {
            let _ = writeln!(s, "  total estimate    {t:.6}");
        }
        if let Some(m) = self.max {
            let _ = writeln!(s, "  max estimate      {m:.6}");
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(s, "  exact total       {:.6}", o.total);
            let _ = writeln!(s, "  exact max         {:.6}", o.max);
        }
        if let Some(m) = &self.metrics {
            let _ = writeln!(
                s,
                "  |log ratio|       mean {:.4}  max {:.4}  ({} compared)",
                m.mean_abs_log_ratio, m.max_abs_log_ratio, m.compared
            );
        }
        if let Some(r) = &self.regression {
            for (i, v) in r.leave_one_out.iter().enumerate() {
                let _ = writeln!(s, "  leave-one-out[{i}]  {v:.6e}");
            }
            if let Some(o) = r.opt {
                let _ = writeln!(s, "  regression opt    {o:.6e}");
            }
        }
        for t in &self.timings {
            let _ = writeln!(s, "  time {:<12} {:.3}s", t.phase, t.seconds);
        }
        s
    }

    /// Writes JSON or CSV depending on the file extension.
    pub fn write(&self, path: &Path) -> Result<()> {
        let body = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => self.to_json()?,
            Some("csv") => self.to_csv(),
            _ => bail!("--out must end in .json or .csv, got {}", path.display()),
        };
        std::fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
