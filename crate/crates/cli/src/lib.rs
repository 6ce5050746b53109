//! Orchestration for the `surfgl` command-line tool: configuration, parameter
//! sweeps, deterministic JSON reports and CSV artifacts.

pub mod case;
pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use case::{solve_case, Case2D, CaseSummary};
pub use config::{Init, RunConfig, Tolerances};
pub use error::CliError;
pub use report::{Record, Report, Timings};
