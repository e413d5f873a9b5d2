//! Config-driven front end for `speclab-core`: builds a model from a JSON
//! experiment file and writes CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 1 config or usage error, 2 a trivial birth space
//! requested as initial state, 3 a hypothesis violation in the coin field,
//! 4 a sweep point disagreeing with its prediction.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Spectrum,
    Birth,
    Sweep,
}

/// Runs `command`, creating `out` if needed. Returns a one-line summary.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path) -> CliResult<String> {
    std::fs::create_dir_all(out)?;
    Ok(match command {
        Command::Simulate => {
            let s = commands::simulate::run(cfg, out)?;
            format!("simulated {} steps; max norm drift {:e}", s.time, s.max_norm_drift)
        }
        Command::Spectrum => {
            let s = commands::spectrum::run(cfg, out)?;
            format!(
                "ring of {} sites; max interior mapping defect {:e}",
                s.sites, s.max_interior_defect
            )
        }
        Command::Birth => {
            let [p, m] = commands::birth::run(cfg, out)?;
            format!("B+: {:?}, B-: {:?}", p.verdict, m.verdict)
        }
        Command::Sweep => {
            let s = commands::sweep::run(cfg, out)?;
            format!(
                "{} points, {} excluded at case boundaries, all others agree",
                s.points, s.excluded
            )
        }
    })
}
