//! Error types for configuration and dataset handling.
//!
//! Contract violations (bad indices, size-limit breaches, dimension
//! mismatches on the hot primitives) panic instead; these enums cover
//! recoverable conditions: user-supplied parameters and untrusted input.

use thiserror::Error;

/// Invalid algorithm or instance parameters.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("s must lie in (0, 1), got {0}")]
    Shrink(f64),
    #[error("beta must lie in (0, 1), got {0}")]
    Beta(f64),
    #[error("eta must lie in (0, 1), got {0}")]
    Eta(f64),
    #[error("gamma must lie in (0, 1), got {0}")]
    Gamma(f64),
    #[error("gamma + beta must stay below 1, got gamma {gamma} + beta {beta}")]
    GammaBeta { gamma: f64, beta: f64 },
    #[error("Theta-constant must be >= 1, got {0}")]
    Constant(f64),
    #[error("sample size {requested} exceeds the memory cap {cap}")]
    SampleBudget { requested: u64, cap: u64 },
    #[error("selection rank {rank} exceeds sample size {sample_size}")]
    RankOverflow { rank: usize, sample_size: usize },
    #[error("rank window violated: need (1+2sigma)*gamma*m < t <= (1-sigma)*(gamma+beta)*m + 1, got t = {rank}")]
    RankWindow { rank: usize },
    #[error("instance must have n >= 1 and d >= 1, got n = {n}, d = {d}")]
    EmptyInstance { n: usize, d: usize },
    #[error("gamma * n must be an integer, got gamma {gamma} with n {n}")]
    OutlierCount { gamma: f64, n: usize },
    #[error("a regular simplex in dimension {d} has {expected} vertices, got n = {n}")]
    SimplexSize { n: usize, d: usize, expected: usize },
    #[error("outlier spread must be >= 1, got {0}")]
    Spread(f64),
}

/// Malformed or unreadable dataset input.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic bytes, expected \"MEBD\"")]
    BadMagic,
    #[error("unsupported format version {0}")]
    BadVersion(u16),
    #[error("dataset declares n = {n}, d = {d}; both must be >= 1")]
    EmptyDeclared { n: u64, d: u64 },
    #[error("dataset size n = {n} x d = {d} overflows the addressable payload")]
    SizeOverflow { n: u64, d: u64 },
    #[error("truncated dataset: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("non-finite coordinate at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("csv line {line}: expected {expected} fields, got {actual}")]
    RaggedRow { line: usize, expected: usize, actual: usize },
    #[error("empty dataset")]
    Empty,
}
