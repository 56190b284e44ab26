//! Configuration, snapshot files and the command drivers behind the CLI.

mod commands;
mod config;
mod snapshot;

pub use commands::{
    check_command, execute, exit_code_for, perturb_command, run_command, sweep_command, Command,
    DIAGNOSTICS_COLUMNS, EXIT_BLOWUP, EXIT_IO, EXIT_MEMBER, EXIT_MONOTONICITY, EXIT_OK,
    EXIT_VERDICT,
};
pub use config::{parse_config, OutputPaths, RunConfig, Scenario};
pub use snapshot::Snapshot;
