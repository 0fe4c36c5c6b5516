//! File-based ingestion, replay and export around the matrix state machine:
//! the transaction-log CSV format, the event CSV format, replay with strict
//! and lenient modes, DOT state-tree visualization, and the JSON report
//! format.

mod csvlog;
mod dot;
mod replay;
mod report;

pub use csvlog::{
    parse_events, parse_txlog, write_events, write_txlog, EVENTS_HEADER, TXLOG_HEADER,
};
pub use dot::{export_dot, validate_dot};
pub use replay::{replay, write_skipped, ReplayError, ReplayMode, ReplayOutcome, SkippedTx};
pub use report::{export_report, parse_report};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    MalformedRow { line: usize, message: String },

    #[error("line {line}: unknown function {name:?}")]
    UnknownFunction { line: usize, name: String },

    #[error("line {line}: ordinal {ordinal} does not increase over {previous}")]
    NonMonotonicOrdinal {
        line: usize,
        ordinal: u64,
        previous: u64,
    },

    #[error("bad report JSON: {0}")]
    BadReport(String),
}

impl IoError {
    pub fn code(&self) -> &'static str {
        match self {
            IoError::MalformedRow { .. } => "malformed-row",
            IoError::UnknownFunction { .. } => "unknown-function",
            IoError::NonMonotonicOrdinal { .. } => "non-monotonic-ordinal",
            IoError::BadReport(_) => "bad-report",
        }
    }
}
