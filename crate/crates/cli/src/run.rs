//! Subcommand execution.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use lpsens::reduce::default_lambda;
use lpsens::total::total_sensitivity;
use lpsens::{
    leave_one_out_multiregression, max_sensitivity, regression_via_sensitivity, sensitivities_exact,
    sensitivities_rowwise, DenseMatrix, EmbedConfig, MaxConfig, RandomSource, RowwiseConfig, TotalConfig,
};

use crate::args::{integral, parse_constants, AllArgs, Common, ExactArgs, MaxArgs, ReduceArgs, TotalArgs};
use crate::input::load_csv;
use crate::report::{
    ConfigEcho, ErrorMetrics, InputDescriptor, OracleValues, Regression, SensitivityReport, SeriesPoint, Timing,
};

struct Stopwatch(Vec<Timing>);

impl Stopwatch {
    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push(Timing { phase: phase.to_string(), seconds: start.elapsed().as_secs_f64() });
        out
    }
}

fn load(common: &Common, clock: &mut Stopwatch) -> Result<(DenseMatrix, InputDescriptor)> {
    let a = clock.time("load", || load_csv(&common.input))?;
    let desc = describe(&common.input, &a);
    Ok((a, desc))
}

pub(crate) fn describe(path: &Path, a: &DenseMatrix) -> InputDescriptor {
    InputDescriptor { path: path.display().to_string(), n_rows: a.n_rows(), n_cols: a.n_cols() }
}

fn echo(seed: u64, constants: BTreeMap<String, f64>) -> ConfigEcho {
    ConfigEcho { seed, alpha: None, gamma: None, repetitions: None, lambda: None, constants }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn oracle(a: &DenseMatrix, p: f64, clock: &mut Stopwatch) -> Result<OracleValues> {
    let exact = clock.time("oracle", || sensitivities_exact(a, p))?;
    Ok(OracleValues { total: exact.total(), max: exact.max(), per_row: exact.values })
}

fn empty_report(command: &str, input: InputDescriptor, p: f64, method: &str, config: ConfigEcho) -> SensitivityReport {
    SensitivityReport {
        command: command.to_string(),
        input,
        p,
        method: method.to_string(),
        config,
        per_row: None,
        total: None,
        max: None,
        oracle: None,
        metrics: None,
        series: None,
        regression: None,
        diagnostics: BTreeMap::new(),
        timings: Vec::new(),
    }
}

pub fn all(args: &AllArgs) -> Result<SensitivityReport> {
    let c = &args.common;
    let constants =
        parse_constants(&c.constants, &[("signs_per_block", 100.0), ("embed_eps", 0.5), ("embed_constant", 4.0)])?;
    if !args.alpha_list.is_empty() && !args.exact {
        bail!("--alpha-list requires --exact");
    }
    let mut clock = Stopwatch(Vec::new());
    let (a, input) = load(c, &mut clock)?;
    let cfg_for = |alpha: usize| -> Result<RowwiseConfig> {
        Ok(RowwiseConfig {
            signs_per_block: integral(&constants, "signs_per_block")?,
            repetitions: args.repetitions,
            embed_eps: constants["embed_eps"],
            embed: EmbedConfig { constant: constants["embed_constant"] },
            ..RowwiseConfig::new(c.p, alpha)
        })
    };
    let rng = RandomSource::new(c.seed);
    let cfg = cfg_for(args.alpha)?;
    let est = clock.time("estimate", || sensitivities_rowwise(&a, &cfg, &rng))?;

    let mut config = echo(c.seed, constants.clone());
    config.alpha = Some(args.alpha);
    config.repetitions = Some(args.repetitions);
    let mut report = empty_report("all", input, c.p, "rowwise", config);
    report.diagnostics.insert("oracle_calls".into(), est.oracle_calls as f64);
    report.diagnostics.insert("embedding_rows".into(), est.embedding_rows as f64);
    report.total = Some(est.weights.total());
    report.max = Some(est.weights.max());

    if args.exact {
        let truth = oracle(&a, c.p, &mut clock)?;
        report.metrics = ErrorMetrics::from_pairs(est.weights.values.iter().copied().zip(truth.per_row.iter().copied()));
        if !args.alpha_list.is_empty() {
            let mut series = Vec::with_capacity(args.alpha_list.len());
            clock.time("series", || -> Result<()> {
                for &alpha in &args.alpha_list {
                    let e = sensitivities_rowwise(&a, &cfg_for(alpha)?, &rng)?;
                    let m = ErrorMetrics::from_pairs(e.weights.values.iter().copied().zip(truth.per_row.iter().copied()))
                        .context("no comparable rows for the accuracy series")?;
                    series.push(SeriesPoint {
                        alpha,
                        mean_abs_log_ratio: m.mean_abs_log_ratio,
                        max_abs_log_ratio: m.max_abs_log_ratio,
                        oracle_calls: e.oracle_calls,
                    });
                }
                Ok(())
            })?;
            if let Some(path) = &args.series_out {
                std::fs::write(path, series_csv(&series))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            report.series = Some(series);
        }
        report.oracle = Some(truth);
    } else if args.series_out.is_some() {
        bail!("--series-out requires --alpha-list and --exact");
    }
    report.per_row = Some(est.weights.values);
    report.timings = clock.0;
    Ok(report)
}

/// `alpha,mean_abs_log_ratio,max_abs_log_ratio,oracle_calls`, one line per α.
pub fn series_csv(series: &[SeriesPoint]) -> String {
    let mut out = String::from("alpha,mean_abs_log_ratio,max_abs_log_ratio,oracle_calls\n");
    for s in series {
        out.push_str(&format!("{},{},{},{}\n", s.alpha, s.mean_abs_log_ratio, s.max_abs_log_ratio, s.oracle_calls));
    }
    out
}

pub(crate) const TOTAL_CONSTANTS: [(&str, f64); 4] =
    [("sample_constant", 10.0), ("embed_eps", 0.5), ("embed_constant", 4.0), ("recursion_constant", 1.0)];

pub(crate) fn total_config(args_p: f64, gamma: f64, method: lpsens::TotalMethod, constants: &BTreeMap<String, f64>) -> TotalConfig {
    TotalConfig {
        sample_constant: constants["sample_constant"],
        embed_eps: constants["embed_eps"],
        embed: EmbedConfig { constant: constants["embed_constant"] },
        recursion_constant: constants["recursion_constant"],
        ..TotalConfig::new(args_p, gamma, method)
    }
}

pub fn total(args: &TotalArgs) -> Result<SensitivityReport> {
    let c = &args.common;
    let constants = parse_constants(&c.constants, &TOTAL_CONSTANTS)?;
    let cfg = total_config(c.p, args.gamma, args.method, &constants);
    let mut clock = Stopwatch(Vec::new());
    let (a, input) = load(c, &mut clock)?;
    let est = clock.time("estimate", || total_sensitivity(&a, &cfg, &RandomSource::new(c.seed)))?;

    let mut config = echo(c.seed, constants);
    config.gamma = Some(args.gamma);
    let mut report = empty_report("total", input, c.p, &args.method.to_string(), config);
    report.total = Some(est.estimate);
    report.diagnostics.insert("oracle_calls".into(), est.oracle_calls as f64);
    report.diagnostics.insert("samples".into(), est.samples as f64);
    report.diagnostics.insert("embedding_rows".into(), est.embedding_rows as f64);
    report.diagnostics.insert("depth".into(), est.depth as f64);
    if args.exact {
        let truth = oracle(&a, c.p, &mut clock)?;
        report.metrics = ErrorMetrics::from_pairs([(est.estimate, truth.total)]);
        report.oracle = Some(truth);
    }
    report.timings = clock.0;
    Ok(report)
}

pub fn max(args: &MaxArgs) -> Result<SensitivityReport> {
    let c = &args.common;
    let constants = parse_constants(&c.constants, &[("embed_eps", 0.5), ("embed_constant", 4.0)])?;
    let cfg = MaxConfig {
        embed_eps: constants["embed_eps"],
        embed: EmbedConfig { constant: constants["embed_constant"] },
        ..MaxConfig::new(c.p)
    };
    let mut clock = Stopwatch(Vec::new());
    let (a, input) = load(c, &mut clock)?;
    let est = clock.time("estimate", || max_sensitivity(&a, &cfg, &RandomSource::new(c.seed)))?;

    let mut report = empty_report("max", input, c.p, "spanner", echo(c.seed, constants));
    report.max = Some(est.estimate);
    report.diagnostics.insert("raw_max".into(), est.raw_max);
    report.diagnostics.insert("multiplier".into(), est.multiplier);
    report.diagnostics.insert("spanner_rows".into(), est.spanner_rows.len() as f64);
    if args.exact {
        let truth = oracle(&a, c.p, &mut clock)?;
        report.metrics = ErrorMetrics::from_pairs([(est.estimate, truth.max)]);
        report.oracle = Some(truth);
    }
    report.timings = clock.0;
    Ok(report)
}

pub fn exact(args: &ExactArgs) -> Result<SensitivityReport> {
    let c = &args.common;
    let constants = parse_constants(&c.constants, &[])?;
    let mut clock = Stopwatch(Vec::new());
    let (a, input) = load(c, &mut clock)?;
    let values = clock.time("estimate", || sensitivities_exact(&a, c.p))?;

    let mut report = empty_report("exact", input, c.p, "exact", echo(c.seed, constants));
    report.total = Some(values.total());
    report.max = Some(max_of(values.as_slice()));
    report.per_row = Some(values.values);
    report.timings = clock.0;
    Ok(report)
}

pub fn reduce(args: &ReduceArgs) -> Result<SensitivityReport> {
    let c = &args.common;
    let constants = parse_constants(&c.constants, &[])?;
    let mut clock = Stopwatch(Vec::new());
    let (a, input) = load(c, &mut clock)?;
    let lambda = args.lambda.unwrap_or_else(|| default_lambda(&a));
    let leave_one_out = clock.time("estimate", || leave_one_out_multiregression(&a, c.p, lambda))?;
    let opt = match args.target_column {
        None => None,
        Some(k) => {
            let d = a.n_cols();
            if k >= d {
                bail!("--target-column {k} is out of range for {d} columns");
            }
            if d < 2 {
                bail!("--target-column needs at least two columns");
            }
            let keep: Vec<usize> = (0..d).filter(|&j| j != k).collect();
            let rows: Vec<Vec<f64>> = a.rows().map(|r| keep.iter().map(|&j| r[j]).collect()).collect();
            let design = DenseMatrix::from_rows(&rows)?;
            let b = a.column(k);
            Some(clock.time("regression", || regression_via_sensitivity(&design, &b, c.p, lambda))?)
        }
    };

    let mut config = echo(c.seed, constants);
    config.lambda = Some(lambda);
    let mut report = empty_report("reduce", input, c.p, "augmented_sensitivity", config);
    report.diagnostics.insert("sensitivity_calls".into(), (leave_one_out.len() + opt.is_some() as usize) as f64);
    report.regression = Some(Regression { leave_one_out, target_column: args.target_column, opt });
    report.timings = clock.0;
    Ok(report)
}
