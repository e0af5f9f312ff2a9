//! Argument parsing and subcommand runners behind the `ranknorm` binary.

pub mod args;
pub mod runner;

pub use args::{Cli, Command};
pub use runner::{CliError, RunOutput, RunStatus};
