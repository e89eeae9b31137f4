use thiserror::Error;

/// Errors surfaced by channel construction, solvers, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mismatched dimensions between related objects.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix row or input distribution failed a stochasticity check.
    #[error("not a probability distribution: {0}")]
    NonStochastic(String),

    /// A size or entry budget would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A file being read back is malformed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
