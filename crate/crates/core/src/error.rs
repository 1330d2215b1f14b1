use thiserror::Error;

use crate::rational::{ParseRationalError, Rational};

#[derive(Debug, Error)]
pub enum Error {
    #[error("prior is not a probability distribution: {0}")]
    NonStochasticPrior(String),
    #[error("type `{0}` has zero prior probability")]
    ZeroProbabilityType(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("welfare entry at ({type_index}, {action}) is negative: {value}")]
    NegativeWelfare {
        type_index: usize,
        action: usize,
        value: Rational,
    },
    #[error("row {row} is not a probability distribution")]
    NonStochasticRow { row: usize },
    #[error("operation requires exactly two receiver actions, game has {0}")]
    NotBinary(usize),
    #[error("welfare is not monotone over the sender and receiver utilities")]
    NotMonotone,
    #[error("operation requires a uniform prior over as many types as actions")]
    NonUniformPrior,
    #[error("alphabet size {requested} exceeds the enumeration limit {limit}")]
    AlphabetTooLarge { requested: usize, limit: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("solver invariant violated: {0}")]
    SolverInvariant(String),
    #[error(transparent)]
    ParseRational(#[from] ParseRationalError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input (as opposed to internal failures).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::SolverInvariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
