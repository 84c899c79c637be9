use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical branch could not reach its requested accuracy.
    #[error("accuracy error in {what}: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy { what: String, achieved: f64, requested: f64 },

    /// A user-supplied function produced a non-finite value.
    #[error("evaluation error at t = {t}: {detail}")]
    Evaluation { t: f64, detail: String },

    /// An internal invariant was violated (a bug, not bad input).
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// All validation failures of a configuration, collected in one pass.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("picard iteration diverged after {} iterations (last update {:.3e})", .history.len(), .history.last().copied().unwrap_or(f64::NAN))]
    Divergence { history: Vec<f64> },

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
