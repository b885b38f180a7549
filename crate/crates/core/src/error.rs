use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("need at least {min} observations, got {got}")]
    TooFewObservations { got: usize, min: usize },

    #[error("non-finite value in {what} at row {row}, column {col}")]
    NonFinite {
        what: &'static str,
        row: usize,
        col: usize,
    },

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("degenerate features: both covariance matrices are numerically zero")]
    DegenerateFeatures,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} refuses n = {n} (limit {limit})")]
    SizeGuard {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("statistic requires univariate x and y, got p = {p}, q = {q}")]
    NotUnivariate { p: usize, q: usize },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("replicate {index} failed: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}
