//! Static embeddings from contextual teacher dumps: decontextualized,
//! aggregate and X2Static distillation.

mod aggregate;
mod decontextualized;
mod x2static;

pub use aggregate::{extract_aggregate, AggregateState, OccurrenceScope};
pub use decontextualized::extract_decontextualized;
pub use x2static::{
    occurrence_loss, occurrence_loss_and_grads, train_x2static, OccurrenceGrads, X2StaticConfig,
    X2StaticModel, X2StaticOutput,
};

use thiserror::Error;

use crate::dump::DumpError;
use crate::scalar::Scalar;
use crate::store::{EmbeddingMatrix, StoreError};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Dump(#[from] DumpError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{} vocabulary words are absent from the dump: {}", .0.len(), .0.join(", "))]
    MissingWords(Vec<String>),
    #[error("record {0} has more than one word; decontextualized extraction needs single-word records")]
    NotSingleWord(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("training diverged at update {update}")]
    Divergence { update: u64 },
}

/// Extracted matrix over the requested vocabulary, plus the words the dump
/// never covered (assigned zero vectors).
#[derive(Debug, Clone)]
pub struct Extraction<T> {
    pub matrix: EmbeddingMatrix<T>,
    pub uncovered: Vec<String>,
}

impl<T: Scalar> Extraction<T> {
    pub fn into_matrix(self) -> EmbeddingMatrix<T> {
        self.matrix
    }
}
