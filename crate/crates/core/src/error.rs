use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The function vanishes (numerically) on the contour and three outward
    /// perturbations did not move the contour off the zero.
    #[error("contour passes through a zero: |f| = {modulus:e} at {re} + {im}i")]
    BoundaryFailure { re: f64, im: f64, modulus: f64 },

    #[error("zero count mismatch: contour winds {expected} times but {found} zeros were isolated")]
    CountMismatch { expected: i64, found: i64 },

    #[error("no zero located: {0}")]
    NoZeroLocated(String),

    #[error("construction failed: {0}")]
    Construction(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
