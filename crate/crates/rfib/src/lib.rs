//! Verification harness, report formats and the `rfib` command-line tool
//! built on [`rfib_core`].

pub mod cli;
pub mod config;
pub mod report;
pub mod verify;

/// Invalid flags or configuration; the CLI exits with status 64.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);
