//! Command-line surface for `glasner-core`: argument parsing, JSON file
//! formats, parallel drivers and JSON/CSV output.

pub mod cli;
pub mod commands;
pub mod error;
pub mod formats;
pub mod output;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;
use glasner_core::Budget;

use crate::cli::{Cli, Format};
use crate::commands::{dispatch, Context};
use crate::error::{CliError, CliResult};
use crate::output::OutputRecord;

/// Result of one invocation: exit code and the two output streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first), runs the command and renders it.
pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Invocation {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Invocation {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Invocation {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Invocation {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn execute(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    let budget = match g.budget {
        Some(0) => {
            return Err(CliError::validation(
                "--budget / GLASNER_BUDGET must be positive",
            ))
        }
        Some(total) => Budget::with_total(total),
        None => Budget::default(),
    };
    let ctx = Context {
        seed: g.seed,
        budget,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.threads)
        .build()
        .map_err(|e| CliError::validation(format!("--threads: {e}")))?;
    let start = Instant::now();
    let out = pool.install(|| dispatch(&cli.command, &ctx))?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    match g.format {
        Format::Csv => match &out.table {
            Some(t) => t.to_csv(),
            None => Err(CliError::validation(format!(
                "--format csv: '{}' has no tabular output; use expsum extremal, powerfull list or glasner hq",
                out.name
            ))),
        },
        Format::Json => Ok(OutputRecord {
            command: out.name.to_string(),
            inputs: out.inputs,
            results: out.results,
            timing_ms: if g.no_timing { 0.0 } else { elapsed },
        }
        .to_json()),
    }
}
