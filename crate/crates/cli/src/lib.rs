//! Config-driven front end: every run is described by a TOML document and
//! writes CSV tables and SVG plots into an output directory.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, RunSummary};
pub use config::{parse_config, parse_config_with, Command, Overrides, RunConfig};
pub use error::CliError;
