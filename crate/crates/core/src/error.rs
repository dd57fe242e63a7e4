use thiserror::Error;

/// Errors produced anywhere in the link simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input size mismatch: expected {expected}, got {actual}")]
    InputSize { expected: usize, actual: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite value in {0}")]
    Numeric(&'static str),

    #[error("insufficient data: need at least {needed} frames, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("target of {target} bits is infeasible, at most {max_bits} bits can be loaded")]
    InfeasibleRate { target: usize, max_bits: usize },

    #[error("record too short: {len} samples, dispersion memory requires at least {required}")]
    RecordTooShort { len: usize, required: usize },

    #[error("synchronization failed: correlation peak {peak:.3} below threshold")]
    SyncFailure { peak: f64 },

    #[error("insufficient statistics: {bits} bits counted, need at least {needed}")]
    InsufficientStatistics { bits: u64, needed: u64 },

    #[error("calibration failed: {reason}")]
    Calibration { reason: String, trace: Vec<(f64, f64)> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
