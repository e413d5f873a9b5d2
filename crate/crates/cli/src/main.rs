use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use speclab_cli::{run, Command, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "speclab",
    version,
    about = "Spectral experiments on split-step quantum walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve an initial state; writes distribution.csv and summary.json.
    Simulate(Args),
    /// Periodic spectra of T and U; writes spectrum_T.csv, spectrum_U.csv and mapping.json.
    Spectrum(Args),
    /// Birth eigenspaces for both signs; writes birth_plus/birth_minus JSON and CSV.
    Birth(Args),
    /// Classification over a parameter grid; writes sweep.csv.
    Sweep(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the config-error code; clap's own default
            // of 2 would collide with the trivial-birth code.
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let (command, args) = match cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Spectrum(a) => (Command::Spectrum, a),
        Cmd::Birth(a) => (Command::Birth, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let result = ExperimentConfig::load(&args.config).and_then(|cfg| run(command, &cfg, &args.out));
    match result {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("speclab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
