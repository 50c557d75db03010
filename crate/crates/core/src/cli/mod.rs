//! Command-line front end of `holonomy-lab`.
//!
//! Exit codes: 0 success, 2 invalid input or config, 3 violated
//! precondition, 4 failed numerical diagnostics.

pub mod args;
pub mod commands;
pub mod config;
pub mod format;

pub use args::{Cli, Command, GateCommand, HolonomyArgs, SweepArgs};
pub use commands::{cmd_gate, cmd_holonomy, cmd_run, cmd_sweep, exit_code, run, THREADS_ENV};
pub use config::{ExperimentConfig, ExperimentRequest, HolonomyRequest, OutputFormat, SCHEMA_VERSION};
pub use format::{csv_number, format_significant, parse_matrix, MatrixJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_DIAGNOSTICS: i32 = 4;
