use std::process::ExitCode;

use clap::Parser;
use netshare_cli::{execute, Cli, THREADS_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var(THREADS_ENV).ok();
    match execute(&cli, threads.as_deref()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("netshare: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
