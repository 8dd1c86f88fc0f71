use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the model's domain (non-positive reserve, fee outside (0, 1), ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// An objective or intermediate value became NaN or infinite.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Invalid sweep or point configuration; `path` names the offending field.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}
