use thiserror::Error;

/// Errors surfaced by the pipeline, the generators, and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("cluster count {k} out of range for {n} instances")]
    ClusterCountOutOfRange { k: usize, n: usize },

    #[error("feature count {d} out of range (data has {m} features)")]
    FeatureCountOutOfRange { d: usize, m: usize },

    #[error("eigensolver failed to converge")]
    EigenNonConvergence,

    #[error("degenerate constraints: {0}")]
    DegenerateConstraints(String),

    #[error("objective routes disagree: pairwise={pairwise}, trace={trace}")]
    ObjectiveMismatch { pairwise: f64, trace: f64 },

    #[error("constraint quota infeasible: {0}")]
    QuotaInfeasible(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-symmetric matrix: entries ({i},{j}) and ({j},{i}) differ")]
    NonSymmetric { i: usize, j: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
