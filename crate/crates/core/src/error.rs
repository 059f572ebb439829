use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator vanishes at n = {index} ({which})")]
    PoleAtIndex { index: u64, which: &'static str },

    #[error("coefficient degrees fit neither supported shape: {0}")]
    UnsupportedShape(String),

    #[error("sub-leading coefficients are not real; no ordering is defined")]
    ComplexSubleading,

    #[error("|x| = {x_abs} is not inside the disc of convergence (radius {radius})")]
    NotInDisc { x_abs: f64, radius: String },

    #[error("no geometric tail bound below 1 within {budget} terms")]
    NoConvergenceWithinBudget { budget: usize },

    #[error("scaled float arithmetic produced a non-finite value at n = {index}")]
    Overflow { index: u64 },

    #[error("zero factor in a Pochhammer denominator at k = {index}")]
    ZeroDenominator { index: u64 },

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("inner truncation cannot be matched to degree {degree}: {reason}")]
    TruncationMismatch { degree: usize, reason: String },

    #[error("no witness within scan limit {scan_limit}: {reason}")]
    WitnessNotFound { scan_limit: u64, reason: String, first_violation: Option<u64> },

    #[error("exact moduli need a real family: {0}")]
    NotReal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short name of the error kind, used by front ends when reporting.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PoleAtIndex { .. } => "PoleAtIndex",
            Error::UnsupportedShape(_) => "UnsupportedShape",
            Error::ComplexSubleading => "ComplexSubleading",
            Error::NotInDisc { .. } => "NotInDisc",
            Error::NoConvergenceWithinBudget { .. } => "NoConvergenceWithinBudget",
            Error::Overflow { .. } => "Overflow",
            Error::ZeroDenominator { .. } => "ZeroDenominator",
            Error::DomainError(_) => "DomainError",
            Error::TruncationMismatch { .. } => "TruncationMismatch",
            Error::WitnessNotFound { .. } => "WitnessNotFound",
            Error::NotReal(_) => "NotReal",
            Error::Parse(_) => "Parse",
        }
    }
}
