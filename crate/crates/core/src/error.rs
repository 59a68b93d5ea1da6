use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, MuleError>;

#[derive(Debug, Error)]
pub enum MuleError {
    /// One or more configuration invariants do not hold.
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("trace error at row {row}: {message}")]
    Trace { row: usize, message: String },

    #[error("trace exhausted at t = {time_s} s (last sample at {last_s} s)")]
    TraceExhausted { time_s: f64, last_s: f64 },

    #[error("oracle instance too large: T = {slots}, N = {sensors} (limit T <= {max_slots}, N <= {max_sensors})")]
    OracleTooLarge {
        slots: usize,
        sensors: usize,
        max_slots: usize,
        max_sensors: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Other(String),
}

impl MuleError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MuleError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_trace_error(&self) -> bool {
        matches!(
            self,
            MuleError::Trace { .. } | MuleError::TraceExhausted { .. }
        )
    }
}
