//! Line-oriented container for contextual teacher output: one JSON header
//! line, then one JSON line per sentence carrying words, base64 little-endian
//! `f32` subword vectors and the subword-to-word alignment.

mod format;
mod pool;
mod record;

pub use format::{read_dump, write_dump, DumpReader, DumpWriter, FORMAT_TAG};
pub use pool::{pool_subwords, PoolingMode};
pub use record::{DumpHeader, SentenceRecord};

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("dump header: {0}")]
    Header(String),
    #[error("record {index}: {message}")]
    Record { index: usize, message: String },
    #[error("invalid record: {0}")]
    Invalid(String),
    #[error("word index {index} out of range for a sentence of {len} words")]
    WordIndex { index: usize, len: usize },
}

pub type RecordIter<'a> = Box<dyn Iterator<Item = Result<SentenceRecord, DumpError>> + 'a>;

/// Re-iterable sentence stream, for consumers that need several passes.
pub trait SentenceSource {
    fn header(&self) -> &DumpHeader;
    fn sentences(&self) -> Result<RecordIter<'_>, DumpError>;
}

/// Dump file on disk; every call to `sentences` reopens and streams it.
#[derive(Debug, Clone)]
pub struct DumpFile {
    path: PathBuf,
    header: DumpHeader,
}

impl DumpFile {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, DumpError> {
        let reader = read_dump(path.as_ref())?;
        Ok(DumpFile {
            path: path.as_ref().to_owned(),
            header: reader.header().clone(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl SentenceSource for DumpFile {
    fn header(&self) -> &DumpHeader {
        &self.header
    }

    fn sentences(&self) -> Result<RecordIter<'_>, DumpError> {
        Ok(Box::new(read_dump(&self.path)?))
    }
}

/// Records held in memory.
#[derive(Debug, Clone)]
pub struct InMemoryDump {
    pub header: DumpHeader,
    pub records: Vec<SentenceRecord>,
}

impl SentenceSource for InMemoryDump {
    fn header(&self) -> &DumpHeader {
        &self.header
    }

    fn sentences(&self) -> Result<RecordIter<'_>, DumpError> {
        Ok(Box::new(self.records.iter().cloned().map(Ok)))
    }
}
