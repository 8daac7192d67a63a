use std::borrow::Cow;

use super::{OovPolicy, StoreError, Vocabulary};
use crate::scalar::{l2_norm, Scalar};

/// Dense `|vocab| x dim` row-major embedding table bound to a vocabulary.
///
/// Immutable after construction; every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<T> {
    vocab: Vocabulary,
    dim: usize,
    values: Vec<T>,
    normalized: bool,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    pub fn new(vocab: Vocabulary, dim: usize, values: Vec<T>) -> Result<Self, StoreError> {
        if dim == 0 {
            return Err(StoreError::ZeroDimension);
        }
        let expected = vocab.len() * dim;
        if values.len() != expected {
            return Err(StoreError::Shape {
                expected,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|x| !x.is_finite()) {
            return Err(StoreError::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(EmbeddingMatrix {
            vocab,
            dim,
            values,
            normalized: false,
        })
    }

    /// Builds a matrix from `(word, vector)` rows.
    pub fn from_rows<I, S>(dim: usize, rows: I) -> Result<Self, StoreError>
    where
        I: IntoIterator<Item = (S, Vec<T>)>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::new();
        let mut values = Vec::new();
        for (word, row) in rows {
            if row.len() != dim {
                return Err(StoreError::Shape {
                    expected: dim,
                    found: row.len(),
                });
            }
            vocab.push(word)?;
            values.extend(row);
        }
        Self::new(vocab, dim, values)
    }

    pub fn zeros(vocab: Vocabulary, dim: usize) -> Result<Self, StoreError> {
        let n = vocab.len() * dim;
        Self::new(vocab, dim, vec![T::zero(); n])
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, idx: usize) -> &[T] {
        &self.values[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.vocab.index_of(word).map(|i| self.row(i))
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[T])> {
        self.vocab.iter().zip(self.values.chunks_exact(self.dim))
    }

    /// Divides each nonzero row by its L2 norm. Returns the normalized matrix
    /// and the number of zero rows, which are left untouched.
    pub fn normalize_rows(&self) -> (Self, usize) {
        let mut values = self.values.clone();
        let mut zero_rows = 0;
        for row in values.chunks_exact_mut(self.dim) {
            let norm = l2_norm(row);
            if norm.is_zero() {
                zero_rows += 1;
                continue;
            }
            for x in row.iter_mut() {
                *x /= norm;
            }
        }
        let m = EmbeddingMatrix {
            vocab: self.vocab.clone(),
            dim: self.dim,
            values,
            normalized: true,
        };
        (m, zero_rows)
    }

    /// Copies the rows of `words`, in their order.
    pub fn restrict(&self, words: &Vocabulary) -> Result<Self, StoreError> {
        let mut values = Vec::with_capacity(words.len() * self.dim);
        for w in words.iter() {
            let row = self
                .get(w)
                .ok_or_else(|| StoreError::MissingWord(w.to_owned()))?;
            values.extend_from_slice(row);
        }
        Ok(EmbeddingMatrix {
            vocab: words.clone(),
            dim: self.dim,
            values,
            normalized: self.normalized,
        })
    }

    /// Stored row for known words, otherwise the deterministic OOV vector.
    pub fn lookup_or_oov(&self, word: &str, policy: &OovPolicy) -> Cow<'_, [T]> {
        match self.get(word) {
            Some(row) => Cow::Borrowed(row),
            None => Cow::Owned(policy.sample(word, self.dim)),
        }
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Scalar>(&self) -> EmbeddingMatrix<U> {
        EmbeddingMatrix {
            vocab: self.vocab.clone(),
            dim: self.dim,
            values: self
                .values
                .iter()
                .map(|&x| U::of(x.to_f64_lossless()))
                .collect(),
            normalized: self.normalized,
        }
    }
}
