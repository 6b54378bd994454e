use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// No reflectance puts the detected mode at sigma11 = 1.
    #[error("no reflectance gives sigma11 = 1 for r1 = {r1}, r2 = {r2} (needs r1 * r2 < 0)")]
    NoSolution { r1: f64, r2: f64 },

    /// A closed form was requested away from sigma11 = 1.
    #[error("closed form needs sigma11 = 1, got sigma11 = {s11}")]
    ConditionViolated { s11: f64 },

    #[error("quadrature did not converge: {coarse} vs {fine} (tolerance {tolerance})")]
    NonConverged {
        coarse: f64,
        fine: f64,
        tolerance: f64,
    },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("probability {prob:e} is below the underflow floor")]
    ZeroProbability { prob: f64 },

    #[error("Fock truncation at N_max = {cutoff} leaves tail mass {tail:e} (limit {limit:e})")]
    TruncationError {
        cutoff: usize,
        tail: f64,
        limit: f64,
    },

    #[error("degenerate state: {0}")]
    DegenerateState(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NoSolution { .. } => "NoSolution",
            Error::ConditionViolated { .. } => "ConditionViolated",
            Error::NonConverged { .. } => "NonConverged",
            Error::DomainError(_) => "DomainError",
            Error::ZeroProbability { .. } => "ZeroProbability",
            Error::TruncationError { .. } => "TruncationError",
            Error::DegenerateState(_) => "DegenerateState",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
