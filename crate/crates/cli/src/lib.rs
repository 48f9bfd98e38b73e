//! Command-line front end: lemma sweeps, bound probes, protocol
//! evaluation and parameter sweeps, reported as JSON or CSV.
//!
//! Exit codes: 0 when every check passed, 1 when some check failed, 2 on
//! usage, parse or I/O errors.

mod commands;
pub mod config;
pub mod grid;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use anyhow::{Context, Result};
use clap::Parser;

pub use commands::execute;
pub use config::{Cli, Command, ExperimentConfig, Flags, Format, ModelKind};
pub use output::{Outcome, Record};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

fn run_parsed(cli: Cli, stdout: &mut dyn Write) -> Result<Outcome> {
    let cfg = cli.flags.resolve(cli.command)?;
    let outcome = execute(&cfg)?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &outcome.body).with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!(
                "wrote {} row(s) to {}; {}",
                outcome.rows,
                path.display(),
                if outcome.pass {
                    "all checks passed"
                } else {
                    "some checks FAILED"
                }
            );
        }
        None => stdout.write_all(outcome.body.as_bytes())?,
    }
    Ok(outcome)
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. The report goes to `stdout` unless `--out` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    match run_parsed(cli, stdout) {
        Ok(o) if o.pass => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
