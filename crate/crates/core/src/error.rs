use thiserror::Error;

/// Errors returned by every fallible routine in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// An adaptive scheme could not reach the requested tolerance.
    #[error("no convergence in {func}: {detail}")]
    Convergence { func: &'static str, detail: String },

    /// A request exceeds the precision of the stored constant tables.
    #[error("precision limit in {func}: {detail}")]
    Precision { func: &'static str, detail: String },

    /// Invalid configuration (simulation or harness parameters).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}

pub(crate) fn convergence(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Convergence {
        func,
        detail: detail.into(),
    }
}
