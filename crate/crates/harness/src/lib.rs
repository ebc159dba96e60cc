//! Scenario runner and command-line front end for `lossylab-core`.

use std::path::PathBuf;

use thiserror::Error;

pub mod cli;
pub mod params;
pub mod report;
pub mod run;
pub mod scenario;

pub use report::{RunReport, Status, Verdict};
pub use run::{run_scenario, RunOptions};
pub use scenario::{Pipeline, Scenario};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}:{line}:{column}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, column: usize, msg: String },
    #[error("{}: {msg}", path.display())]
    Io { path: PathBuf, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lossylab_core::Error),
}

/// Exit codes of the command-line tool.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const VERDICT_FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
}
