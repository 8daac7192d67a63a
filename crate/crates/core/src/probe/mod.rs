//! Frozen-embedding BiLSTM tagger used as an extrinsic probe.

mod adam;
mod corpus;
mod model;
mod stats;
mod sweep;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState, ProbeOptimizer};
pub use corpus::{load_conll, read_conll, TaggedCorpus, TaggedSentence};
pub use model::{sample_dropout_mask, LstmCell, ProbeModel, ProbeParams, SequenceExample};
pub use stats::spearman;
pub use sweep::{cell_seed, grid_csv, metrics_csv, sweep, CorpusSplits, GridMetric, SweepCell, SweepResult};
pub use train::{evaluate_accuracy, train, BestDev, EpochMetrics, Encoder, ProbeConfig, TrainOutcome};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("batch has no labelled tokens")]
    EmptyBatch,
    #[error("corpus has no sentences")]
    EmptyCorpus,
    #[error("gold tag {0} is outside the tagset")]
    UnknownTag(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("non-finite gradient at optimizer step {step}")]
    Divergence { step: u64 },
    #[error("invalid sentence: {0}")]
    Data(String),
}
