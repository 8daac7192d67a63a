use serde::Serialize;

use super::AnalogyError;
use crate::scalar::{dot, l2_norm, Scalar};
use crate::store::EmbeddingMatrix;

/// Scoring rule for `a : b :: c : ?`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalogyMethod {
    /// cos(x, b - a + c)
    #[default]
    CosAdd,
    /// cos'(x, b) * cos'(x, c) / (cos'(x, a) + 1e-3), with cos' = (cos + 1) / 2
    CosMul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolveOptions {
    pub method: AnalogyMethod,
    /// Remove `a`, `b` and `c` from the candidate set.
    pub exclude_query_words: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: AnalogyMethod::CosAdd,
            exclude_query_words: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<T> {
    /// Row index in the embedding vocabulary.
    pub index: usize,
    pub score: T,
}

const COSMUL_EPS: f64 = 1e-3;

/// Ranks up to `k` answers to `a : b :: c : ?` over a row-normalized matrix.
///
/// Results are sorted by descending score, ties by ascending vocabulary index.
pub fn solve_analogy<T: Scalar>(
    m: &EmbeddingMatrix<T>,
    a: &str,
    b: &str,
    c: &str,
    k: usize,
    opts: SolveOptions,
) -> Result<Vec<Candidate<T>>, AnalogyError> {
    if !m.is_normalized() {
        return Err(AnalogyError::NotNormalized);
    }
    if k == 0 {
        return Err(AnalogyError::ZeroK);
    }
    let idx = |w: &str| {
        m.vocab()
            .index_of(w)
            .ok_or_else(|| AnalogyError::MissingWord(w.to_owned()))
    };
    Ok(solve_indices(m, idx(a)?, idx(b)?, idx(c)?, k, opts))
}

/// Index-level core of [`solve_analogy`]; the caller guarantees valid indices,
/// a normalized matrix and `k >= 1`.
pub fn solve_indices<T: Scalar>(
    m: &EmbeddingMatrix<T>,
    a: usize,
    b: usize,
    c: usize,
    k: usize,
    opts: SolveOptions,
) -> Vec<Candidate<T>> {
    debug_assert!(m.is_normalized());
    let mut top = TopK::new(k);
    let excluded = |i: usize| opts.exclude_query_words && (i == a || i == b || i == c);
    match opts.method {
        AnalogyMethod::CosAdd => {
            let (va, vb, vc) = (m.row(a), m.row(b), m.row(c));
            let mut query: Vec<T> = (0..m.dim()).map(|j| vb[j] - va[j] + vc[j]).collect();
            let norm = l2_norm(&query);
            if norm.is_zero() {
                query.iter_mut().for_each(|x| *x = T::zero());
            } else {
                query.iter_mut().for_each(|x| *x /= norm);
            }
            for i in (0..m.len()).filter(|&i| !excluded(i)) {
                top.offer(i, dot(m.row(i), &query));
            }
        }
        AnalogyMethod::CosMul => {
            let half = T::of(0.5);
            let eps = T::of(COSMUL_EPS);
            let shifted = |x: &[T], y: usize| (dot(x, m.row(y)) + T::one()) * half;
            for i in (0..m.len()).filter(|&i| !excluded(i)) {
                let x = m.row(i);
                let score = shifted(x, b) * shifted(x, c) / (shifted(x, a) + eps);
                top.offer(i, score);
            }
        }
    }
    top.into_vec()
}

/// Bounded best-k buffer. Candidates must be offered in ascending index
/// order, so an equal score never displaces an earlier entry.
struct TopK<T> {
    k: usize,
    items: Vec<Candidate<T>>,
}

impl<T: Scalar> TopK<T> {
    fn new(k: usize) -> Self {
        TopK {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn offer(&mut self, index: usize, score: T) {
        if self.items.len() == self.k && score <= self.items[self.k - 1].score {
            return;
        }
        let pos = self.items.partition_point(|c| c.score >= score);
        self.items.insert(pos, Candidate { index, score });
        self.items.truncate(self.k);
    }

    fn into_vec(self) -> Vec<Candidate<T>> {
        self.items
    }
}
