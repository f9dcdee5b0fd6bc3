use thiserror::Error;

use crate::mub::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid matrix shape {rows}x{cols}: {reason}")]
    InvalidShape {
        rows: usize,
        cols: usize,
        reason: &'static str,
    },

    #[error("matrix is not invertible (rank {rank} of {size})")]
    NotInvertible { rank: usize, size: usize },

    #[error("fibonacci index not found below bound {bound}")]
    IndexNotFound { bound: usize },

    #[error("polynomial must be nonzero with degree >= 1")]
    DegenerateModulus,

    #[error("symplectic vector has odd length {0}")]
    OddLength(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("{what} supports at most {max} qubits, got {n}")]
    TooManyQubits {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("invalid generator triple:\n{0}")]
    InvalidTriple(ValidationReport),

    #[error("invalid generator:\n{0}")]
    InvalidGenerator(ValidationReport),

    #[error("generator G_{j} has rank {rank}, expected {n}")]
    RankDeficientClass { j: usize, rank: usize, n: usize },

    #[error("F_{j}(B) is singular; closed form unavailable")]
    SingularFibonacci { j: usize },

    #[error("unclassified triple: A is nonzero but equals q(B)R + D for some polynomial q and diagonal D")]
    UnclassifiedTriple,

    #[error("class {0} is not abelian")]
    NonAbelianClass(usize),

    #[error("constraint {0:#b} has odd weight, so no qubit partition satisfies it (the operators anticommute)")]
    OddConstraint(u64),

    #[error("finest partition is ambiguous; candidates: {}", .0.join(", "))]
    AmbiguousPartition(Vec<String>),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not symplectic: (C^T J C - J)[{row}][{col}] != 0")]
    NotSymplectic { row: usize, col: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("unknown format `{0}`")]
    UnknownFormat(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
