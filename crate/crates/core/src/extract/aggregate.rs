use serde::{Deserialize, Serialize};

use super::{ExtractError, Extraction};
use crate::dump::{pool_subwords, PoolingMode, SentenceRecord, SentenceSource};
use crate::scalar::Scalar;
use crate::store::{EmbeddingMatrix, Vocabulary};

/// What one occurrence of a word contributes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OccurrenceScope {
    /// Mean of the word's own subword vectors.
    #[default]
    Word,
    /// Mean of every aligned subword vector in the sentence.
    Sentence,
}

/// Per-word running means with compensated summation.
#[derive(Debug, Clone)]
pub struct AggregateState<T> {
    dim: usize,
    cap: Option<u64>,
    means: Vec<T>,
    compensation: Vec<T>,
    counts: Vec<u64>,
}

impl<T: Scalar> AggregateState<T> {
    pub fn new(n_words: usize, dim: usize, cap: Option<u64>) -> Self {
        AggregateState {
            dim,
            cap,
            means: vec![T::zero(); n_words * dim],
            compensation: vec![T::zero(); n_words * dim],
            counts: vec![0; n_words],
        }
    }

    /// Folds one occurrence vector into word `w`'s mean. Returns false once
    /// the word has reached the cap.
    pub fn update(&mut self, w: usize, v: &[T]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        if self.cap.is_some_and(|cap| self.counts[w] >= cap) {
            return false;
        }
        self.counts[w] += 1;
        let n = T::from_u64(self.counts[w]).expect("count fits the scalar type");
        let range = w * self.dim..(w + 1) * self.dim;
        let means = &mut self.means[range.clone()];
        let comp = &mut self.compensation[range];
        for ((m, c), &x) in means.iter_mut().zip(comp.iter_mut()).zip(v) {
            // Kahan-compensated m += (x - m) / n
            let y = (x - *m) / n - *c;
            let t = *m + y;
            *c = (t - *m) - y;
            *m = t;
        }
        true
    }

    pub fn count(&self, w: usize) -> u64 {
        self.counts[w]
    }

    pub fn mean(&self, w: usize) -> &[T] {
        &self.means[w * self.dim..(w + 1) * self.dim]
    }

    /// Matrix of means (zero rows for unseen words) and the unseen words.
    pub fn finish(self, vocab: &Vocabulary) -> Result<Extraction<T>, ExtractError> {
        let uncovered = vocab
            .iter()
            .zip(&self.counts)
            .filter(|(_, &c)| c == 0)
            .map(|(w, _)| w.to_owned())
            .collect();
        Ok(Extraction {
            matrix: EmbeddingMatrix::new(vocab.clone(), self.dim, self.means)?,
            uncovered,
        })
    }
}

fn sentence_mean<T: Scalar>(rec: &SentenceRecord) -> Vec<T> {
    let mut acc = vec![T::zero(); rec.dim()];
    let mut n = 0usize;
    for &i in rec.alignment().iter().flatten() {
        n += 1;
        for (a, &x) in acc.iter_mut().zip(rec.subword(i)) {
            *a += T::of_f32(x);
        }
    }
    if n > 0 {
        let n = T::from_usize(n).expect("subword count fits the scalar type");
        acc.iter_mut().for_each(|a| *a /= n);
    }
    acc
}

/// Averages each vocabulary word's contextual vectors over its occurrences,
/// keeping at most `cap` occurrences per word.
pub fn extract_aggregate<T: Scalar>(
    source: &dyn SentenceSource,
    vocab: &Vocabulary,
    cap: Option<u64>,
    scope: OccurrenceScope,
) -> Result<Extraction<T>, ExtractError> {
    let dim = source.header().dim;
    let mut state = AggregateState::new(vocab.len(), dim, cap);
    for rec in source.sentences()? {
        let rec = rec?;
        let sentence = match scope {
            OccurrenceScope::Sentence => Some(sentence_mean::<T>(&rec)),
            OccurrenceScope::Word => None,
        };
        for (i, word) in rec.words().iter().enumerate() {
            let Some(w) = vocab.index_of(word) else {
                continue;
            };
            match &sentence {
                Some(v) => state.update(w, v),
                None => state.update(w, &pool_subwords::<T>(&rec, i, PoolingMode::Mean)?),
            };
        }
    }
    state.finish(vocab)
}
