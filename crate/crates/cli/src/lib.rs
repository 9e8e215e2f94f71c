//! Configuration parsing and CSV-producing subcommands behind `plate-sg`.

pub mod commands;
pub mod config;

pub use commands::{execute, run_command, Command, Failure, Outcome};
pub use config::{parse_config, RunConfig};
