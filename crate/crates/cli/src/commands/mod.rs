//! The four subcommands. Each reads a validated config and writes its
//! artifacts into an output directory.

pub mod birth;
pub mod simulate;
pub mod spectrum;
pub mod sweep;
