//! Brute-force versus approximate total sensitivity over a sweep of p.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use lpsens::generate::heavy_tailed;
use lpsens::total::total_sensitivity;
use lpsens::{sensitivities_exact, DenseMatrix, RandomSource};
use serde::{Deserialize, Serialize};

use crate::args::{parse_constants, BenchArgs};
use crate::input::load_csv;
use crate::report::InputDescriptor;
use crate::run::{describe, total_config, TOTAL_CONSTANTS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub p: f64,
    /// Worst-case total sensitivity `d^{max(1, p/2)}`.
    pub total_upper_bound: f64,
    pub brute_force: f64,
    pub approximation: f64,
    pub brute_runtime_s: f64,
    pub approx_runtime_s: f64,
}

impl BenchRow {
    pub fn ratio(&self) -> f64 {
        self.approximation / self.brute_force
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub input: InputDescriptor,
    pub seed: u64,
    pub gamma: f64,
    pub method: String,
    pub rows: Vec<BenchRow>,
}

pub const CSV_HEADER: &str = "p,total_upper_bound,brute_force,approximation,brute_runtime_s,approx_runtime_s";

pub fn upper_bound(d: usize, p: f64) -> f64 {
    (d as f64).powf(f64::max(1.0, p / 2.0))
}

impl BenchTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.p, r.total_upper_bound, r.brute_force, r.approximation, r.brute_runtime_s, r.approx_runtime_s
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "bench | input {} ({}x{}) | method {} | gamma {} | seed {}\n",
            self.input.path, self.input.n_rows, self.input.n_cols, self.method, self.gamma, self.seed
        );
        let _ = writeln!(
            s,
            "  {:>5}  {:>11}  {:>11}  {:>13}  {:>7}  {:>9}  {:>9}",
            "p", "upper bound", "brute force", "approximation", "ratio", "brute s", "approx s"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "  {:>5}  {:>11.3}  {:>11.3}  {:>13.3}  {:>7.3}  {:>9.3}  {:>9.3}",
                r.p,
                r.total_upper_bound,
                r.brute_force,
                r.approximation,
                r.ratio(),
                r.brute_runtime_s,
                r.approx_runtime_s
            );
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let body = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::to_string_pretty(self)?,
            Some("csv") => self.to_csv(),
            _ => bail!("--out must end in .json or .csv, got {}", path.display()),
        };
        std::fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))
    }
}

pub fn bench(args: &BenchArgs) -> Result<BenchTable> {
    if args.p_list.is_empty() {
        bail!("--p-list is empty");
    }
    let constants = parse_constants(&args.constants, &TOTAL_CONSTANTS)?;
    let (a, input): (DenseMatrix, InputDescriptor) = match &args.input {
        Some(path) => {
            let a = load_csv(path)?;
            let desc = describe(path, &a);
            (a, desc)
        }
        None => {
            let a = heavy_tailed(args.rows, args.cols, args.seed);
            let desc = describe(&PathBuf::from(format!("synthetic:heavy_tailed:{}x{}", args.rows, args.cols)), &a);
            (a, desc)
        }
    };
    let d = a.n_cols();
    let rng = RandomSource::new(args.seed);
    let mut rows = Vec::with_capacity(args.p_list.len());
    for (k, &p) in args.p_list.iter().enumerate() {
        let cfg = total_config(p, args.gamma, args.method, &constants);
        let start = Instant::now();
        let brute = sensitivities_exact(&a, p)?.total();
        let brute_runtime_s = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let approx = total_sensitivity(&a, &cfg, &rng.split(k as u64))?.estimate;
        let approx_runtime_s = start.elapsed().as_secs_f64();
        rows.push(BenchRow {
            p,
            total_upper_bound: upper_bound(d, p),
            brute_force: brute,
            approximation: approx,
            brute_runtime_s,
            approx_runtime_s,
        });
    }
    Ok(BenchTable { input, seed: args.seed, gamma: args.gamma, method: args.method.to_string(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_bound_matches_tabulated_values() {
        assert_eq!(upper_bound(14, 1.0), 14.0);
        assert_eq!(upper_bound(14, 1.5), 14.0);
        assert!((upper_bound(14, 3.0) - 52.383).abs() < 1e-3);
    }

    #[test]
    fn csv_layout() {
        let t = BenchTable {
            input: InputDescriptor { path: "x".into(), n_rows: 3, n_cols: 2 },
            seed: 0,
            gamma: 0.5,
            method: "lewis_oneshot".into(),
            rows: vec![BenchRow {
                p: 1.0,
                total_upper_bound: 2.0,
                brute_force: 1.5,
                approximation: 1.6,
                brute_runtime_s: 0.1,
                approx_runtime_s: 0.05,
            }],
        };
        assert_eq!(t.to_csv(), format!("{CSV_HEADER}\n1,2,1.5,1.6,0.1,0.05\n"));
    }
}
