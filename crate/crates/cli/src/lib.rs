//! Scenario-driven front end for `mmd-core`.
//!
//! Exit codes: `0` when every check passes, `1` when a check fails, `2` when
//! the scenario cannot be loaded or interpreted.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;
pub mod suite;

use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

pub use commands::{Command, Context};
pub use error::{CliError, Result};
pub use report::{Check, Format, Report};
pub use scenario::Scenario;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_SCENARIO_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mmd",
    version,
    about = "Measurement-coupling scenarios over finite abelian groups"
)]
pub struct Options {
    #[arg(value_enum)]
    pub command: Command,

    /// Scenario file (JSON, schema version 1). Not needed for `suite`.
    #[arg(long)]
    pub scenario: Option<PathBuf>,

    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Cap on dense cascade dimensions.
    #[arg(long, env = "MMD_MAX_DIM", default_value_t = mmd_core::amplifier::DEFAULT_MAX_DIM)]
    pub max_dim: usize,
}

/// Builds the report for `opts` without writing it.
pub fn build_report(opts: &Options) -> Result<Report> {
    let scenario = match (&opts.scenario, opts.command) {
        (Some(path), _) => Scenario::load(path)?,
        (None, Command::Suite) => Scenario::default(),
        (None, command) => {
            return Err(CliError::MissingScenario {
                command: command.as_str().into(),
            })
        }
    };
    let ctx = Context {
        seed: opts.seed.unwrap_or(scenario.seed),
        max_dim: opts.max_dim,
    };
    commands::execute(opts.command, &scenario, ctx)
}

/// Runs one command end to end and returns the process exit code.
pub fn run(opts: &Options) -> i32 {
    let start = Instant::now();
    let outcome = build_report(opts).and_then(|report| {
        report::emit(&report, opts.out.as_deref(), opts.format)?;
        Ok(report)
    });
    // timing stays out of the report so reruns are byte-identical
    eprintln!(
        "mmd {}: {:.1} ms",
        opts.command.as_str(),
        start.elapsed().as_secs_f64() * 1e3
    );
    match outcome {
        Ok(report) if report.pass => EXIT_PASS,
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!(
                    "check failed: {} = {:e} (tolerance {:e})",
                    c.name, c.value, c.tolerance
                );
            }
            EXIT_CHECK_FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_SCENARIO_ERROR
        }
    }
}
