use serde::{Deserialize, Serialize};

use super::DumpError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub format: String,
    pub dim: usize,
    pub teacher: String,
    /// Which teacher layer produced the vectors; metadata only.
    pub layer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentences: Option<u64>,
}

impl DumpHeader {
    pub fn new(dim: usize, teacher: impl Into<String>, layer: impl Into<String>) -> Self {
        DumpHeader {
            format: super::FORMAT_TAG.to_owned(),
            dim,
            teacher: teacher.into(),
            layer: layer.into(),
            sentences: None,
        }
    }
}

/// One sentence of teacher output.
///
/// `alignment[w]` lists the subword indices of word `w`: nonempty, strictly
/// increasing, pairwise disjoint and in range. Subwords outside every list
/// (special tokens) are carried but never pooled.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRecord {
    words: Vec<String>,
    dim: usize,
    vectors: Vec<f32>,
    alignment: Vec<Vec<usize>>,
}

impl SentenceRecord {
    /// `vectors` holds the subword vectors row-major, `dim` values each.
    pub fn new(
        words: Vec<String>,
        dim: usize,
        vectors: Vec<f32>,
        alignment: Vec<Vec<usize>>,
    ) -> Result<Self, DumpError> {
        if dim == 0 {
            return Err(DumpError::Invalid("dimension must be positive".into()));
        }
        if vectors.len() % dim != 0 {
            return Err(DumpError::Invalid(format!(
                "{} values do not form whole {dim}-dimensional vectors",
                vectors.len()
            )));
        }
        if alignment.len() != words.len() {
            return Err(DumpError::Invalid(format!(
                "{} words but {} alignment entries",
                words.len(),
                alignment.len()
            )));
        }
        let n_sub = vectors.len() / dim;
        let mut used = vec![false; n_sub];
        for (w, idx) in alignment.iter().enumerate() {
            if idx.is_empty() {
                return Err(DumpError::Invalid(format!("word {w} has no subwords")));
            }
            if idx.windows(2).any(|p| p[0] >= p[1]) {
                return Err(DumpError::Invalid(format!(
                    "alignment of word {w} is not strictly increasing"
                )));
            }
            for &i in idx {
                if i >= n_sub {
                    return Err(DumpError::Invalid(format!(
                        "word {w} references subword {i} of {n_sub}"
                    )));
                }
                if std::mem::replace(&mut used[i], true) {
                    return Err(DumpError::Invalid(format!(
                        "subword {i} is aligned to more than one word"
                    )));
                }
            }
        }
        Ok(SentenceRecord {
            words,
            dim,
            vectors,
            alignment,
        })
    }

    /// Builds a record from per-subword vectors.
    pub fn from_subwords(
        words: Vec<String>,
        subwords: &[Vec<f32>],
        alignment: Vec<Vec<usize>>,
    ) -> Result<Self, DumpError> {
        let dim = subwords.first().map_or(0, Vec::len);
        if subwords.iter().any(|v| v.len() != dim) {
            return Err(DumpError::Invalid("subword vectors differ in length".into()));
        }
        Self::new(words, dim, subwords.concat(), alignment)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_subwords(&self) -> usize {
        self.vectors.len() / self.dim
    }

    pub fn subword(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vectors(&self) -> &[f32] {
        &self.vectors
    }

    pub fn alignment(&self) -> &[Vec<usize>] {
        &self.alignment
    }
}
