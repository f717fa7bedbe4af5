use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("numeric error: {message} (best estimate {estimate}, error bound {error_bound})")]
    Numeric {
        message: String,
        estimate: f64,
        error_bound: f64,
    },

    #[error("model is not regular: {0}")]
    NotRegular(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("replication {index} failed: {message}")]
    Replication { index: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn estimation(msg: impl Into<String>) -> Self {
        Error::Estimation(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
