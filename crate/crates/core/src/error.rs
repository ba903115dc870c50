use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("atom {index} is singular or nearly singular (|det| = {det:e})")]
    SingularAtom { index: usize, det: f64 },
    #[error("measure has empty support")]
    EmptySupport,
    #[error("atom {0} has non-positive weight")]
    NonPositiveWeight(usize),
    #[error("weights sum to zero")]
    ZeroTotalWeight,
    #[error("enumeration of {atoms}^{n} words exceeds the cap of {cap}")]
    EnumerationCap { atoms: usize, n: usize, cap: u64 },
    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("spectral gap estimate unavailable: {0}")]
    GapUnavailable(String),
    #[error("window domination failed after {attempts} attempts (worst violation {violation:e})")]
    Domination { attempts: usize, violation: f64 },
    #[error("partition of unity: {0}")]
    Partition(String),
    #[error("degenerate model: {0}")]
    Degenerate(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("estimates cache {0} not found; run the `estimate` command first")]
    MissingEstimates(PathBuf),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
