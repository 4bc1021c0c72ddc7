//! `smlab`: simulate transaction-fee pricing dynamics with quasi-patient
//! users, sweep the patience factor, and report analytic bounds.
//!
//! Exit codes: 0 success, 1 a run violated an invariant, 2 usage or
//! configuration error.

mod commands;
mod config;
mod plot;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Outcome;
use config::{CommonArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "smlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monopolist and serial-market quantities of the demand curve.
    Quantities(CommonArgs),
    /// Run the price dynamics for one delta and write the trajectory.
    Simulate(CommonArgs),
    /// Estimate the minimum admission price over a grid of deltas.
    Sweep(CommonArgs),
    /// Upper and lower bounds on the minimum admission price.
    Bounds(CommonArgs),
    /// Run every invariant check on one trajectory and report residuals.
    Verify(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, cmd): (&CommonArgs, fn(&RunConfig) -> anyhow::Result<Outcome>) = match &cli.command {
        Command::Quantities(a) => (a, commands::quantities),
        Command::Simulate(a) => (a, commands::simulate),
        Command::Sweep(a) => (a, commands::sweep),
        Command::Bounds(a) => (a, commands::bounds),
        Command::Verify(a) => (a, commands::verify),
    };
    match RunConfig::resolve(args).and_then(|cfg| cmd(&cfg)) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
