use didm_core::predicate::PredicateError;
use didm_core::DecodeError;
use didm_protocol::ProtocolError;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A proof, transaction or predicate check said no.
    #[error("{0}")]
    Rejected(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error("sequence file: {0}")]
    Sequence(#[from] DecodeError),
    #[error(transparent)]
    Forge(#[from] didm_core::forge::ForgeError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Rejected(_) => 1,
            _ => 2,
        }
    }
}
