use super::{ExtractError, Extraction};
use crate::dump::{pool_subwords, PoolingMode, SentenceSource};
use crate::scalar::Scalar;
use crate::store::{EmbeddingMatrix, Vocabulary};

/// Mean-pools each vocabulary word's subwords from its single-word record.
///
/// Only the first record of a word counts. Records for words outside
/// `vocab` are skipped.
pub fn extract_decontextualized<T: Scalar>(
    source: &dyn SentenceSource,
    vocab: &Vocabulary,
) -> Result<Extraction<T>, ExtractError> {
    let dim = source.header().dim;
    let mut values = vec![T::zero(); vocab.len() * dim];
    let mut seen = vec![false; vocab.len()];
    for (index, rec) in source.sentences()?.enumerate() {
        let rec = rec?;
        if rec.words().len() != 1 {
            return Err(ExtractError::NotSingleWord(index));
        }
        let Some(w) = vocab.index_of(&rec.words()[0]) else {
            continue;
        };
        if std::mem::replace(&mut seen[w], true) {
            continue;
        }
        let v: Vec<T> = pool_subwords(&rec, 0, PoolingMode::Mean)?;
        values[w * dim..(w + 1) * dim].copy_from_slice(&v);
    }
    let missing: Vec<String> = vocab
        .iter()
        .zip(&seen)
        .filter(|(_, &s)| !s)
        .map(|(w, _)| w.to_owned())
        .collect();
    if !missing.is_empty() {
        return Err(ExtractError::MissingWords(missing));
    }
    Ok(Extraction {
        matrix: EmbeddingMatrix::new(vocab.clone(), dim, values)?,
        uncovered: Vec::new(),
    })
}
