//! Scenario runner behind the `macrostab` command-line tool.

pub mod error;
pub mod report;
pub mod runner;
pub mod scenario;

pub use error::{CliError, CliResult};
pub use report::{Report, Table};
pub use runner::{run_ground, run_scenario, GroundParams, RunOutput};
pub use scenario::{
    parse_geometry, parse_sizes, parse_state_arg, validate, Experiment, OutputFormat, Scenario,
};

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "MACROSTAB_THREADS";
