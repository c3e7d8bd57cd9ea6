//! Command-line orchestration for the `lpsens` estimators: CSV ingestion,
//! subcommand execution, report persistence and the benchmark sweep.

pub mod args;
pub mod bench;
pub mod input;
pub mod report;
pub mod run;

use anyhow::Result;

use crate::args::Command;
use crate::bench::BenchTable;
use crate::report::SensitivityReport;

pub enum Outcome {
    Report(Box<SensitivityReport>),
    Bench(BenchTable),
}

impl Outcome {
    pub fn summary(&self) -> String {
        match self {
            Self::Report(r) => r.summary(),
            Self::Bench(t) => t.summary(),
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    Ok(match command {
        Command::All(a) => Outcome::Report(Box::new(run::all(a)?)),
        Command::Total(a) => Outcome::Report(Box::new(run::total(a)?)),
        Command::Max(a) => Outcome::Report(Box::new(run::max(a)?)),
        Command::Exact(a) => Outcome::Report(Box::new(run::exact(a)?)),
        Command::Reduce(a) => Outcome::Report(Box::new(run::reduce(a)?)),
        Command::Bench(a) => Outcome::Bench(bench::bench(a)?),
    })
}

fn out_path(command: &Command) -> Option<&std::path::Path> {
    match command {
        Command::All(a) => a.common.out.as_deref(),
        Command::Total(a) => a.common.out.as_deref(),
        Command::Max(a) => a.common.out.as_deref(),
        Command::Exact(a) => a.common.out.as_deref(),
        Command::Reduce(a) => a.common.out.as_deref(),
        Command::Bench(a) => a.out.as_deref(),
    }
}

/// Runs a parsed command: prints the summary and writes `--out` if given.
pub fn run(command: &Command) -> Result<()> {
    let outcome = execute(command)?;
    print!("{}", outcome.summary());
    if let Some(path) = out_path(command) {
        match &outcome {
            Outcome::Report(r) => r.write(path)?,
            Outcome::Bench(t) => t.write(path)?,
        }
    }
    Ok(())
}

/// Exit status for a failed run: 2 when a solver failed to converge,
/// 1 for every other error.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let diverged = err
        .chain()
        .any(|e| matches!(e.downcast_ref::<lpsens::Error>(), Some(lpsens::Error::NonConvergence { .. })));
    if diverged {
        2
    } else {
        1
    }
}
