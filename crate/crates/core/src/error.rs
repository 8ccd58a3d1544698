use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration or matrix would exceed the configured resource cap.
    #[error("resource limit exceeded: {what} needs {requested}, cap is {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("kernel {kernel} is undefined or invalid at {element}")]
    KernelValue { kernel: String, element: String },

    #[error("certificate unavailable: {0}")]
    Uncertified(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow while counting {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
