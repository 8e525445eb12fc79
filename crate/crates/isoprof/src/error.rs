use thiserror::Error;

/// Failure categories. The CLI maps these onto process exit codes
/// (usage -> 2, resource -> 3, numerical -> 4).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Usage(String),

    #[error("resource limit ({what}): {detail}")]
    Resource { what: &'static str, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Resource {
            what: "io",
            detail: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn resource(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Resource {
            what,
            detail: detail.into(),
        }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
