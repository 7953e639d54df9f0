use thiserror::Error;

/// Errors produced by estimators, tests, and the simulation harness.
///
/// `InvalidInput` and `InvalidTau` indicate a caller-side problem (bad data
/// or parameters); the remaining variants are computational degeneracies that
/// can arise from valid but uninformative data.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid tau: {0}")]
    InvalidTau(String),

    /// The data-driven restriction-time rule has no solution because some
    /// group contains no events of interest.
    #[error("tau undefined; supply tau explicitly")]
    TauUndefined,

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("permutation failure: {0}")]
    Permutation(String),

    #[error("simulation failure: {0}")]
    Simulation(String),
}

impl Error {
    /// True when the error reflects bad caller input rather than a
    /// degeneracy encountered during computation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::InvalidTau(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
