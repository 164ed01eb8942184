//! Command-line front end: structure generation, single solves and
//! direction sweeps with JSON, CSV and structured-points outputs.

pub mod args;
pub mod commands;
pub mod directions;
pub mod error;
pub mod export;
pub mod report;

use std::io::Write;

pub use args::{Cli, Command};
pub use error::CliError;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "FRACFLOW_THREADS";

pub fn run(cli: &Cli, out: &mut impl Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(a) => commands::run_generate(a, out),
        Command::Solve(a) => commands::run_solve(a, out).map(|_| ()),
        Command::Sweep(a) => commands::run_sweep(a, out).map(|_| ()),
    }
}

/// Reads the thread cap; unset means rayon's default.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}
