//! `qhall`: simulate, compile, sweep and ensemble-average nuclear-spin chain
//! programs.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid input, 3 compilation
//! did not converge.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod compile;
mod ensemble;
mod io;
mod simulate;
mod sweep;

use io::Failure;

#[derive(Parser)]
#[command(
    name = "qhall",
    version,
    about = "Nuclear-spin chain simulator and gate compiler"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program on a chain and write a result file.
    Simulate(simulate::Args),
    /// Compile a standard gate into a program.
    Compile(compile::Args),
    /// Sweep one chain parameter and tabulate an ensemble observable as CSV.
    Sweep(sweep::Args),
    /// Run a program over disordered replicas and report statistics.
    Ensemble(ensemble::Args),
}

/// Inputs shared by the commands that run a program.
#[derive(clap::Args, Debug, Clone)]
pub struct RunInputs {
    /// Chain file (JSON).
    pub chain: PathBuf,
    /// Program file (JSON).
    pub program: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate::run(&a),
        Command::Compile(a) => compile::run(&a),
        Command::Sweep(a) => sweep::run(&a),
        Command::Ensemble(a) => ensemble::run(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::Internal(e) => eprintln!("internal error: {e:#}"),
                Failure::NotConverged => eprintln!("compilation did not converge"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
