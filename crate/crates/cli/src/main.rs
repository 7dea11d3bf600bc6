mod attack;
mod export;
mod hwcost;
mod io;
mod optblock;
mod simulate;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub const DEFAULT_SEED: u64 = 1;

/// Secure accelerator memory-protection simulator and adversary oracles.
#[derive(Parser, Debug)]
#[command(name = "secacc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep protection schemes over workloads and write reports.
    Simulate(simulate::Args),
    /// Run the SECA or RePA adversary against a naive or defended scheme.
    Attack(attack::Args),
    /// Print optimal authentication blocks for a topology.
    Optblock(optblock::Args),
    /// Area and energy of T-AES and B-AES designs.
    Hwcost(hwcost::Args),
    /// Write the synthesized DRAM trace of a workload as CSV.
    ExportTrace(export::Args),
}

/// An oracle or check produced an outcome that contradicts the model.
#[derive(Debug)]
pub struct Unexpected(pub String);

impl fmt::Display for Unexpected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Unexpected {}

/// 2 for bad input, 3 for violated invariants.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Unexpected>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<secacc_core::Error>() {
            return match e {
                secacc_core::Error::Internal(_) | secacc_core::Error::DerivationFailure(_) => 3,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Attack(a) => attack::run(a),
        Command::Optblock(a) => optblock::run(a),
        Command::Hwcost(a) => hwcost::run(a),
        Command::ExportTrace(a) => export::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
