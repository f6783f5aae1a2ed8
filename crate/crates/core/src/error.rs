//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: length {len} is not a power of two")]
    NotPowerOfTwo { what: &'static str, len: usize },

    #[error("{what}: expected {expected}, got {got}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("block is already {kind}; operation requires {required}")]
    WrongBlockKind {
        kind: &'static str,
        required: &'static str,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid map construction failed: {reason}")]
    MapConstruction { reason: String },

    #[error("accumulator holds {count} samples; at least 2 required")]
    InsufficientData { count: u64 },

    #[error("gain moments diverge as c -> 0; require c > 0 (got {c})")]
    GainMomentDivergence { c: f64 },

    #[error("quadrature failed to converge on [{a}, {b}]")]
    QuadratureNoConvergence { a: f64, b: f64 },

    #[error("optimum search could not bracket a minimum; scanned grid: {grid}")]
    BracketFailure { grid: String },

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("profile file error at line {line}: {msg}")]
    Profile { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
