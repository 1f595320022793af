use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input does not follow the JSON schema.
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },

    /// An operation entry has the wrong degree for its weight.
    #[error("degree inhomogeneity at {location}: {message}")]
    Degree { location: String, message: String },

    /// Input structure does not square to zero.
    #[error("Maurer-Cartan equation fails at weight {weight}:\n{relation}")]
    MaurerCartan { weight: usize, relation: String },

    /// Input dg algebra breaks d² = 0, Leibniz or associativity.
    #[error("invalid dg algebra: {0}")]
    DgAlgebra(String),

    /// Two computations that must agree did not. Always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { location: location.into(), message: message.into() }
    }

    /// True for errors caused by bad user input rather than bugs.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Schema { .. }
                | Error::Degree { .. }
                | Error::MaurerCartan { .. }
                | Error::DgAlgebra(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
