use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the domain of the model (non-finite values,
    /// non-positive widths, |J| > 1, violated preconditions).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("numeric error: {message} (last estimates: {last:?}, {previous:?})")]
    Numeric {
        message: String,
        last: Option<[f64; 2]>,
        previous: Option<[f64; 2]>,
    },

    #[error("no closed form for {0}")]
    UnsupportedMethod(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("empty report: {0}")]
    EmptyReport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric {
            message: msg.into(),
            last: None,
            previous: None,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric { .. } | Error::EmptyReport(_) => 1,
            Error::Domain(_)
            | Error::Config(_)
            | Error::UnsupportedMethod(_)
            | Error::Json(_) => 2,
            Error::Validation(_) => 3,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
