//! `braidfan`: command-line front end for the braidfan library.
//!
//! Machine output goes to stdout (or `-o`), diagnostics and progress to
//! stderr. Exit codes: 0 success / true / PASS, 1 false / FAIL, 2 usage or
//! input errors, 3 inconclusive.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
