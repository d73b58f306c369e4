use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value at curve {curve}, time index {time}, coordinate {coord}")]
    NonFiniteValue { curve: usize, time: usize, coord: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("too few curves: got {got}, need at least {need}")]
    TooFewCurves { got: usize, need: usize },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("projected MAD is zero while the point deviates from the median")]
    UnboundedOutlyingness,

    #[error("infinite outlyingness for curve {curve} at time index {time}")]
    InfiniteOutlyingness { curve: usize, time: usize },

    #[error("scatter matrix is singular or numerically rank-deficient")]
    SingularScatter,

    #[error("invalid degrees of freedom: m = {m} must exceed d - 1 = {}", .d - 1)]
    InvalidDf { m: f64, d: usize },

    #[error("covariance matrix is not positive definite after jitter escalation")]
    NotPositiveDefinite,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures map to exit code 3, everything else to 2.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularScatter
                | Error::InvalidDf { .. }
                | Error::NotPositiveDefinite
                | Error::InfiniteOutlyingness { .. }
                | Error::UnboundedOutlyingness
        )
    }
}
