//! Batch harness for the moment experiments of `hml-core`: experiment grids,
//! a deterministic job scheduler, CSV reports and the divisor-table cache.

pub mod cache;
pub mod cli;
pub mod grid;
pub mod report;
pub mod run;

pub use grid::{parse_grid, GridPoint};
pub use report::{emit_csv, parse_csv, ReportRow, HEADER};
pub use run::{execute, run, schedule, Command, Outcome, RunConfig, Summary};

use std::path::PathBuf;

/// Exit codes of the `hml` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const JOB_FAILED: i32 = 2;
    pub const CONFIG: i32 = 64;
    pub const IO: i32 = 74;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("cache error: {0}")]
    Cache(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Io { .. } | CliError::Cache(_) => exit::IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, e: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.into(), msg: e.to_string() }
    }
}
