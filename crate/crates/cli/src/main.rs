mod args;
mod concat;
mod dtp;
mod output;
mod sweep;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

/// Decoding transition probabilities, BER/FER sweeps and Monte-Carlo runs for BCH codes.
#[derive(Debug, Parser)]
#[command(name = "bchdtp", version)]
struct Cli {
    /// Re-run the command stored in a JSON config or manifest
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Transition-probability table over a (u, e) grid
    Dtp(dtp::DtpArgs),
    /// Analytic BER/FER over Eb/N0, optionally with Monte-Carlo columns
    Sweep(sweep::SweepArgs),
    /// Oracle and invariant checks on short codes
    Validate(validate::ValidateArgs),
    /// FER of the concatenated RS/BCH scheme
    Concat(concat::ConcatArgs),
}

/// A failed check, reported with exit code 2.
#[derive(Debug)]
pub struct ValidationFailed(pub String);

impl std::fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "validation failed: {}", self.0)
    }
}

impl std::error::Error for ValidationFailed {}

fn run(cli: Cli) -> Result<()> {
    let command = match (cli.config, cli.command) {
        (Some(path), None) => output::read_command(&path)?,
        (None, Some(c)) => c,
        (Some(_), Some(_)) => {
            anyhow::bail!("--config replaces the subcommand; give one or the other")
        }
        (None, None) => anyhow::bail!("no subcommand given (dtp, sweep, validate, concat)"),
    };
    match &command {
        Command::Dtp(a) => dtp::run(a, &command),
        Command::Sweep(a) => sweep::run(a, &command),
        Command::Validate(a) => validate::run(a, &command),
        Command::Concat(a) => concat::run(a, &command),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<ValidationFailed>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
