//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph has {n} vertices, exceeding the cap of {max} for this operation")]
    GraphTooLarge { n: usize, max: usize },

    #[error("graph is not strongly semiconnected (edge ({from}, {to}) lies on no cycle)")]
    NotSemiconnected { from: usize, to: usize },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("matrix is not doubly stochastic")]
    NotDoublyStochastic,

    #[error("digraph admits no doubly stochastic weight assignment")]
    NotDoublyStochasticable,

    #[error("C = {c} is below the DS-character {ds}")]
    CTooSmall { c: u64, ds: u64 },

    #[error("C = {c} is below the degree bound {bound} (max of max out-degree and max in-degree)")]
    CTooSmallForDegrees { c: u64, bound: u64 },

    #[error("row {row} of the matrix sums to zero; the normalization map is undefined")]
    ZeroRow { row: usize },

    #[error("invalid choice in round {round}: {reason}")]
    InvalidChoice { round: usize, reason: String },

    #[error("graph exceeds the size supported by method {method}")]
    MethodSizeExceeded { method: &'static str },

    #[error("protocol did not settle within {max_steps} steps; this signals an engine bug")]
    MaxStepsExceeded { max_steps: usize },

    #[error("vertex index {index} out of range for a graph of order {n}")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("self-loop ({v}, {v}) on a graph that does not allow self-loops")]
    SelfLoopNotAllowed { v: usize },

    #[error("duplicate edge ({from}, {to})")]
    DuplicateEdge { from: usize, to: usize },

    #[error("cannot parse {text:?} as an exact weight")]
    BadWeight { text: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("negative weight {weight} on edge ({from}, {to})")]
    NegativeWeight {
        from: usize,
        to: usize,
        weight: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
