use thiserror::Error;

/// Errors produced by the solvers and file loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("the zero matrix is not a valid input here")]
    ZeroMatrix,

    #[error("exact StQP solver capped at n = {cap}, got n = {n}")]
    ExactSolverCap { n: usize, cap: usize },

    #[error("exact StQP search visited more than {budget} supports")]
    ExactSearchBudget { budget: u64 },

    #[error("regular grid too large: n = {n}, r = {r} ({reason})")]
    GridTooLarge { n: usize, r: u64, reason: String },

    #[error("epsilon {epsilon} outside (0, {upper}]")]
    EpsilonRange { epsilon: f64, upper: f64 },

    #[error("zero subgradient with nonzero step numerator {numerator}")]
    ZeroSubgradient { numerator: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("index oracle failed at iteration {iteration}: {source}")]
    Oracle {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
