use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("model: {0}")]
    Model(#[from] picheck_core::Error),
}

impl CliError {
    pub fn invalid(field: &str, message: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
