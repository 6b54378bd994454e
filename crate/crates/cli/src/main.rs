//! `gpscat`: tabulates heralded cat states, method comparisons and
//! validation reports as CSV or JSON.

mod args;
mod commands;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{sigma, sweep, validate, wavefunction};
use error::{CliError, CliResult};

/// Heralded cat-state generation by photon counting on a two-mode Gaussian
/// state.
///
/// Numbers are written with 17 significant digits. Exit status is 0 on
/// success, 1 when validation checks fail and 2 on bad parameters or any
/// other error, which is also reported on stderr as
/// {"error": {"kind": ..., "message": ...}}.
#[derive(Debug, Parser)]
#[command(name = "gpscat", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wavefunction matrix sigma, its inverse and momentum-domain form, and
    /// the solved reflectance
    Sigma(sigma::SigmaArgs),
    /// Heralded wavefunction next to its cat target
    Wavefunction(wavefunction::WavefunctionArgs),
    /// Success probabilities and rates of each method over input squeezing
    Sweep(sweep::SweepArgs),
    /// Cross-checks between the analytic, quadrature and Fock-space paths
    Validate(validate::ValidateArgs),
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sigma(a) => sigma::run(a),
        Command::Wavefunction(a) => wavefunction::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Validate(a) => validate::run(a),
    }
}

fn report(err: &CliError) -> ExitCode {
    let doc = json!({ "error": { "kind": err.kind(), "message": err.to_string() } });
    let _ = writeln!(std::io::stderr(), "{doc}");
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => return report(&CliError::Usage(e.to_string().trim_end().to_string())),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
