use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid rank multiset: {0}")]
    InvalidRanks(String),

    #[error("invalid tie pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid pattern weights: {0}")]
    InvalidWeights(String),

    #[error("invalid number {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("{what} = {value} exceeds the compute cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: u128,
        cap: u128,
    },

    #[error("variance is zero; the normal approximation is undefined")]
    ZeroVariance,

    #[error("cache file is corrupt or has an unsupported layout: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid_arg(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
