//! Command-line runner: parses flags, merges them over an optional config
//! file, runs one subcommand and writes its tables and reports.
//!
//! Exit codes: 0 success, 1 usage or run error, 2 failed assertion under
//! `--check`.

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod preset;

use args::Cli;
use config::RunConfig;
pub use error::CliError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_CHECK_FAILED: u8 = 2;

/// Caps rayon's worker count from `CNLS_THREADS`. Only the first call in a
/// process takes effect.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CNLS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "CNLS_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Resolved configuration for a parsed command line.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        out: cli.out.clone(),
        check: cli.check.then_some(true),
        ..cli.command.overrides()
    };
    Ok(file.overlay(flags).completed(cli.command.name()))
}

pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
        }
    };
    let result = configure_threads()
        .and_then(|()| resolve(&cli))
        .and_then(|cfg| commands::execute(&cfg).map(|outcome| (cfg, outcome)));
    match result {
        Ok((cfg, outcome)) => {
            for failure in &outcome.failures {
                eprintln!("check failed: {failure}");
            }
            if cfg.check == Some(true) && !outcome.failures.is_empty() {
                EXIT_CHECK_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            EXIT_ERROR
        }
    }
}
