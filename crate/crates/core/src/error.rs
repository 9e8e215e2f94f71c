use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("singular system at lambda = {lambda}: i*lambda is an eigenvalue ({eigenvalue}) of the block with sigma = {sigma}")]
    Singular {
        lambda: f64,
        sigma: f64,
        eigenvalue: Complex64,
    },

    #[error("closed-form denominator vanishes (sigma = {sigma}, lambda = {lambda})")]
    ZeroDenominator { sigma: f64, lambda: f64 },

    #[error("need at least {needed} points inside the fit window, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("{what} does not apply at (theta, beta) = ({theta}, {beta})")]
    Inapplicable { what: String, theta: f64, beta: f64 },

    #[error("witness residual {residual:e} exceeds tolerance at sigma = {sigma}")]
    ResidualViolation { sigma: f64, residual: f64 },

    #[error("eigensolver failed to converge for the block with sigma = {sigma}")]
    EigenNonConvergence { sigma: f64 },

    #[error("mode truncation inadequate: {0}")]
    TruncationInadequate(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
