//! `scootsim` command-line driver.
//!
//! Subcommands compose through files only: `ingest` cleans a raw trip export,
//! `odmatrix` picks the reduced tract set, `simulate` runs the scenario sweep,
//! `analyze` fits the per-condition regressions and `report` writes boxplot
//! aggregates. `synth` generates demand when no real export is at hand.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 schema or configuration error,
//! 3 regression did not converge.

mod cmd;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "scootsim", version, about = "Crowdsourced e-scooter rental simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clean a raw dockless-trip CSV export.
    Ingest(cmd::ingest::Args),
    /// Build the O-D matrix and select the reduced tract set.
    Odmatrix(cmd::odmatrix::Args),
    /// Replay demand under every (fleet, range, scenario) condition.
    Simulate(cmd::simulate::Args),
    /// Fit scenario regressions to daily metrics.
    Analyze(cmd::analyze::Args),
    /// Write boxplot-ready summaries of daily metrics.
    Report(cmd::report::Args),
    /// Generate synthetic cleaned trips.
    Synth(cmd::synth::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => cmd::ingest::run(a),
        Command::Odmatrix(a) => cmd::odmatrix::run(a),
        Command::Simulate(a) => cmd::simulate::run(a),
        Command::Analyze(a) => cmd::analyze::run(a),
        Command::Report(a) => cmd::report::run(a),
        Command::Synth(a) => cmd::synth::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scootsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
