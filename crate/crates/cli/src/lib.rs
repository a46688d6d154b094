//! Command-line front end for `netshare`.
//!
//! Every subcommand resolves to a [`RunConfig`], runs through [`run`] and
//! produces a [`Report`] that renders as CSV or as a text table. Exit codes:
//! 0 success, 2 config error, 3 resource cap, 4 invariant failure.

pub mod commands;
pub mod config;
mod error;
pub mod output;

use std::io::Write;

pub use commands::run;
pub use config::{Cli, Command, Format, RunConfig};
pub use error::CliError;
pub use output::{Cell, Report};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "NETSHARE_THREADS";

pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Runs `cfg` on a dedicated pool of at most `threads` workers.
pub fn run_with_threads(cfg: &RunConfig, threads: Option<usize>) -> Result<Report, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Resource(e.to_string()))?;
    pool.install(|| run(cfg))
}

pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => report.to_csv(),
        Format::Table => Ok(report.to_table()),
    }
}

/// Resolves, runs and writes a parsed command line. Returns the exit code.
pub fn execute(cli: &Cli, threads_env: Option<&str>) -> Result<u8, CliError> {
    let cfg = cli.resolve()?;
    let report = run_with_threads(&cfg, thread_cap(threads_env)?)?;
    let text = render(&report, cfg.format())?;
    match &cfg.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    for failure in &report.failures {
        eprintln!("invariant failure: {failure}");
    }
    Ok(if report.failures.is_empty() { 0 } else { 4 })
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
