use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes do not fit together.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A matrix side or register width would exceed the configured cap.
    #[error("size cap exceeded: {what} needs dimension {requested}, cap is {cap}")]
    SizeCap {
        what: String,
        requested: String,
        cap: usize,
    },

    /// Input lies outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    /// The circuit failed structural validation.
    #[error("{0}")]
    Invalid(crate::circuit::Violation),

    /// A reduction could not be assembled from the given circuits.
    #[error("construction error: {0}")]
    Construction(String),

    /// A computed object violated an invariant it must satisfy by construction.
    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("not completely positive: Choi eigenvalue {0:.3e}")]
    NotCompletelyPositive(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn size(what: impl Into<String>, requested: impl ToString, cap: usize) -> Self {
        Error::SizeCap {
            what: what.into(),
            requested: requested.to_string(),
            cap,
        }
    }
}
