//! Desk-scale laboratory for the falsified-clause search problem over random CNFs.
//!
//! The crate builds, on exactly-verifiable instance sizes, the whole chain that
//! turns a random CNF into a communication lower-bound argument: random Δ-CNF
//! sampling, exhaustive bipartite-expansion certification, δ-good variable
//! partitions, deterministic protocol trees with exact rectangle bookkeeping,
//! density-restoring partitions, conversion of general protocols into
//! subcube-like ones, expander closures, and the final per-leaf error bounds.
//! Every probability that can be exact is kept as an exact rational; every
//! lemma-style guarantee is re-checked on concrete instances rather than assumed.
//!
//! Entry points are the modules below, the runnable programs in `examples/`,
//! and the `lab` binary for batch runs emitting JSON reports.

pub mod bigraph;
pub mod bounds;
pub mod closure;
pub mod cnf;
pub mod concentration;
pub mod conversion;
pub mod partition;
pub mod pointset;
pub mod protocol;
pub mod ratio;
pub mod report;
pub mod structure;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty instance: every clause fell into an error set")]
    EmptyInstance,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("internal postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
