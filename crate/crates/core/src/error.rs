use thiserror::Error;

use crate::dynamics::Pathology;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters are individually valid but do not fit together.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("measure has no samples")]
    EmptyMeasure,

    /// Too many trajectories were excluded as pathological.
    #[error(
        "run flagged: {n_pathological} of {n_total} trajectories pathological \
         (fraction {fraction:.3e} exceeds {limit:.0e})"
    )]
    RunFlagged { n_pathological: u64, n_total: u64, fraction: f64, limit: f64 },

    #[error("weights do not sum to one (sum = {0})")]
    Weight(f64),

    #[error("iteration cap of {0} exceeded")]
    CapExceeded(u64),

    /// The input sits on a parity boundary where the oracle is undefined.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ray never reaches the boundary")]
    NoInteraction,

    #[error("pathological trajectory: {0:?}")]
    Pathological(Pathology),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
