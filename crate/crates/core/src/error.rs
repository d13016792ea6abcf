use thiserror::Error;

/// Errors raised by oracles, steps and the benchmark harness.
///
/// Variants marked as defects indicate a broken internal invariant rather
/// than bad user input; they are surfaced instead of panicking so callers
/// can report the offending instance.
#[derive(Debug, Error)]
pub enum FwError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("no blocking coordinate along direction (defect)")]
    NoBlocking,

    #[error("zero curvature along a descent ray (defect)")]
    FlatDescent,

    #[error("restriction failed at coordinate {coord}: value {value} vs required {required}")]
    RestrictFailed { coord: usize, value: f64, required: f64 },

    #[error("support atom is not representable in the reduced polytope (defect)")]
    AtomRestrict,

    #[error("no perfect matching exists")]
    Infeasible,

    #[error("empty restricted polytope (defect)")]
    EmptyFace,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = FwError> = std::result::Result<T, E>;
