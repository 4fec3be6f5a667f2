//! Command-line front end for the elastodynamic solver: a line-oriented
//! configuration format, the commands behind the `elasto` binary, and CSV
//! and VTK writers.

pub mod build;
pub mod commands;
pub mod config;
pub mod output;

pub use commands::{
    cmd_compare, cmd_export, cmd_solve, cmd_validate, cmd_verify, cmd_verify_with, load_config, CliError, Outcome,
    OutputOptions, EXIT_ERROR, EXIT_FAIL, EXIT_PASS,
};
pub use config::{parse_config, render_config, ConfigError, RunConfig};
