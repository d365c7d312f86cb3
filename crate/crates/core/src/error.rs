use thiserror::Error;

/// Errors raised by the moment engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A Gamma function argument reached a pole (a non-positive value).
    #[error("Gamma pole: {0}")]
    Pole(String),

    #[error("insufficient quadrature nodes: need {required} per dimension, got {given}")]
    InsufficientNodes { required: usize, given: usize },

    #[error("series evaluated outside its convergence domain: {0}")]
    ConvergenceDomain(String),

    /// `|x|^2` coincides with an eigenvalue of the shift matrix.
    #[error("singular shift: |x|^2 - sigma vanishes for sigma = {0}")]
    SingularShift(f64),

    #[error("wrong symmetry class: {0}")]
    WrongBeta(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
