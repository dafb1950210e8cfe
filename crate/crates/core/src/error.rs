//! Error type shared across the crate.

/// Errors produced by the library.
///
/// The CLI maps these onto exit codes: usage errors (`InvalidArgument`,
/// `Budget`) exit 1, data errors (`Schema`, `Data`, `Io`) exit 2, and
/// `Numerical` exits 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller violated an operation's precondition (bad index, K > N, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Schema file problems: parse errors, duplicate names, bad kinds.
    #[error("schema error: {0}")]
    Schema(String),

    /// Data problems: unknown labels, unparseable cells, shape mismatches.
    #[error("data error: {0}")]
    Data(String),

    /// Exact enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    /// A numerical procedure failed to produce a finite result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }
}
