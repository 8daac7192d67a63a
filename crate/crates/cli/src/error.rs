use thiserror::Error;

use embedprobe::analogy::AnalogyError;
use embedprobe::dump::DumpError;
use embedprobe::extract::ExtractError;
use embedprobe::probe::ProbeError;
use embedprobe::StoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Input { path: String, source: Box<CliError> },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Analogy(#[from] AnalogyError),
    #[error(transparent)]
    Dump(#[from] DumpError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{failed} of {total} sweep cells failed; completed cells were written")]
    PartialSweep { failed: usize, total: usize },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Attaches the offending path to an error raised while reading it.
    pub fn at(path: impl AsRef<std::path::Path>) -> impl FnOnce(CliError) -> CliError {
        let path = path.as_ref().display().to_string();
        move |e| CliError::Input {
            path,
            source: Box::new(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
