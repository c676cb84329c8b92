use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {func} at {at}")]
    Pole { func: &'static str, at: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("base order mismatch: {left} vs {right}")]
    BaseOrderMismatch { left: String, right: String },

    #[error("prefactor mismatch: {left} vs {right}")]
    PrefactorMismatch { left: String, right: String },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("declared decay violated: {0}")]
    DecayViolated(String),

    #[error("integral diverges: {0}")]
    Divergent(String),
}

impl Error {
    /// True for failures that come from numerical iteration rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence(_) | Error::DecayViolated(_) | Error::Divergent(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
