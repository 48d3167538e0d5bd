use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} out of range: {detail}")]
    Range { what: &'static str, detail: String },

    #[error("invalid parameter `{param}`: {detail}")]
    Validation { param: String, detail: String },

    #[error("feature schema mismatch: {0}")]
    Schema(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("estimator mismatch: {0}")]
    Mismatch(String),
}

impl Error {
    pub(crate) fn validation(param: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Validation { param: param.into(), detail: detail.into() }
    }
}
