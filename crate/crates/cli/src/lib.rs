//! Command-line front end: argument model, report formatting and commands.

pub mod commands;
pub mod config;
pub mod format;

pub use commands::{execute, exit_code, Outcome, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
pub use config::{CmChoice, Command, GammaChoice, OutputFormat, RunConfig};
