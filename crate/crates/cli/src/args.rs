//! Command-line definitions.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use lpsens::TotalMethod;

#[derive(Debug, Parser)]
#[command(name = "lpsens", version, about = "Exact and approximate lp sensitivities of tall matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate the sensitivity of every row.
    All(AllArgs),
    /// Approximate the total sensitivity.
    Total(TotalArgs),
    /// Approximate the maximum sensitivity.
    Max(MaxArgs),
    /// Brute-force sensitivities of every row.
    Exact(ExactArgs),
    /// Regression problems answered through sensitivity calls.
    Reduce(ReduceArgs),
    /// Sweep p and compare brute-force and approximate totals.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Comma-separated numeric matrix, one row per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report file; .json or .csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides for internal constants, e.g. `embed_eps=0.3,signs_per_block=50`.
    #[arg(long, value_delimiter = ',', value_name = "KEY=VALUE")]
    pub constants: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct AllArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of rows per hashing block.
    #[arg(long, default_value_t = 10)]
    pub alpha: usize,
    /// Independent repetitions combined by a median; must be odd.
    #[arg(long, default_value_t = 9)]
    pub repetitions: usize,
    /// Also run the brute-force oracle and report error metrics.
    #[arg(long)]
    pub exact: bool,
    /// Additional α values for the accuracy series; requires --exact.
    #[arg(long, value_delimiter = ',')]
    pub alpha_list: Vec<usize>,
    /// CSV file receiving the accuracy series.
    #[arg(long)]
    pub series_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TotalArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.2)]
    pub gamma: f64,
    /// lewis_oneshot or recursive_l1.
    #[arg(long, default_value = "lewis_oneshot")]
    pub method: TotalMethod,
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MaxArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Regularization weight; defaults to a value scaled to the input.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Column used as the regression target; the rest form the design matrix.
    #[arg(long)]
    pub target_column: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Input matrix; a synthetic heavy-tailed matrix is used when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2.5,3")]
    pub p_list: Vec<f64>,
    #[arg(long, default_value_t = 0.75)]
    pub gamma: f64,
    #[arg(long, default_value = "lewis_oneshot")]
    pub method: TotalMethod,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Shape of the synthetic matrix.
    #[arg(long, default_value_t = 177)]
    pub rows: usize,
    #[arg(long, default_value_t = 14)]
    pub cols: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_name = "KEY=VALUE")]
    pub constants: Vec<String>,
}

/// Parses `key=value` overrides against a table of known keys and defaults.
/// The result echoes every known key, overridden or not.
pub fn parse_constants(raw: &[String], known: &[(&str, f64)]) -> Result<BTreeMap<String, f64>> {
    let mut out: BTreeMap<String, f64> = known.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for item in raw {
        let Some((key, value)) = item.split_once('=') else {
            bail!("constant {item:?} is not of the form key=value");
        };
        let key = key.trim();
        if !out.contains_key(key) {
            let names: Vec<&str> = known.iter().map(|(k, _)| *k).collect();
            bail!("unknown constant {key:?}; expected one of {}", names.join(", "));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("constant {key}: {value:?} is not a number"))?;
        if !value.is_finite() || value <= 0.0 {
            bail!("constant {key} must be positive and finite");
        }
        out.insert(key.to_string(), value);
    }
    Ok(out)
}

/// Reads an integral constant.
pub fn integral(constants: &BTreeMap<String, f64>, key: &str) -> Result<usize> {
    let v = constants[key];
    if v.fract() != 0.0 || v < 1.0 {
        bail!("constant {key} must be a positive integer, got {v}");
    }
    Ok(v as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn constants_echo_defaults_and_overrides() {
        let known = [("a", 1.0), ("b", 2.0)];
        let c = parse_constants(&["b=3.5".to_string()], &known).unwrap();
        assert_eq!(c["a"], 1.0);
        assert_eq!(c["b"], 3.5);
        assert!(parse_constants(&["c=1".to_string()], &known).is_err());
        assert!(parse_constants(&["b".to_string()], &known).is_err());
        assert!(parse_constants(&["b=-1".to_string()], &known).is_err());
        assert!(integral(&c, "b").is_err());
        assert_eq!(integral(&c, "a").unwrap(), 1);
    }

    #[test]
    fn unknown_flags_are_rejected() {
        assert!(Cli::try_parse_from(["lpsens", "exact", "--input", "x.csv", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["lpsens", "total", "--input", "x.csv", "--method", "nope"]).is_err());
        let cli = Cli::try_parse_from(["lpsens", "bench"]).unwrap();
        match cli.command {
            Command::Bench(b) => assert_eq!(b.p_list, vec![1.0, 1.5, 2.5, 3.0]),
            _ => unreachable!(),
        }
    }
}
