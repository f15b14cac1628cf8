//! `shrubflow`: implicitize hypocycloids, classify and synthesize shrubs,
//! simulate orbits and report on fields.

mod classify;
mod config;
mod error;
mod implicitize;
mod plot;
mod report;
mod simulate;
mod synthesize;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Parser)]
#[command(name = "shrubflow", version, about = "Sphere flows whose limit set is a prescribed shrub boundary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact implicit equation of the k-cusped hypocycloid.
    Implicitize(implicitize::Args),
    /// Odd buds, odd cactuses, puncture set and orientation certificate.
    Classify {
        shrub: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lay out a shrub and write its field bundle.
    Synthesize(synthesize::Args),
    /// Integrate orbits of a field bundle and estimate their limit sets.
    Simulate(simulate::Args),
    /// Tangency, south-pole Jacobian and field size on the zero set.
    Report(report::Args),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Implicitize(a) => implicitize::run(a),
        Command::Classify { shrub, out } => classify::run(&shrub, out.as_deref()),
        Command::Synthesize(a) => synthesize::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Report(a) => report::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.code())
        }
    }
}
