use std::borrow::Cow;

use rayon::prelude::*;
use serde::Serialize;

use super::{solve_indices, AnalogyDataset, AnalogyError, SolveOptions};
use crate::scalar::Scalar;
use crate::store::EmbeddingMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Rank cutoff; gold answers ranked below it score 0.
    pub k: usize,
    pub solve: SolveOptions,
    pub parallel: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            k: 10,
            solve: SolveOptions::default(),
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryScore {
    pub name: String,
    pub n_questions: usize,
    pub accuracy: f64,
    pub mrr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalogyResult {
    pub per_category: Vec<CategoryScore>,
    pub n_questions: usize,
    pub overall_accuracy: f64,
    /// Question-weighted MRR.
    pub overall_mrr: f64,
    /// Unweighted mean of per-category MRR over nonempty categories.
    pub average_mrr: f64,
    pub k: usize,
}

/// 1-based gold ranks for one category; `None` when the gold answer is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryRanks {
    pub name: String,
    pub ranks: Vec<Option<usize>>,
}

/// Counts of gold answers per rank `1..=k`, plus the question total.
#[derive(Debug, Clone)]
struct RankHistogram {
    counts: Vec<u64>,
    n: u64,
}

impl RankHistogram {
    fn new(k: usize) -> Self {
        RankHistogram {
            counts: vec![0; k + 1],
            n: 0,
        }
    }

    fn add(&mut self, rank: Option<usize>) {
        self.n += 1;
        if let Some(r) = rank.filter(|&r| r >= 1 && r < self.counts.len()) {
            self.counts[r] += 1;
        }
    }

    fn merge(&mut self, other: &RankHistogram) {
        self.n += other.n;
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    fn accuracy(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.counts[1] as f64 / self.n as f64
    }

    // Summing per rank rather than per question keeps the result independent
    // of question order.
    fn mrr(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let sum = self
            .counts
            .iter()
            .enumerate()
            .skip(1)
            .fold(0.0, |acc, (r, &c)| acc + c as f64 / r as f64);
        sum / self.n as f64
    }
}

/// Accuracy and MRR from per-question ranks at cutoff `k`. Ranks above `k`
/// count as absent.
pub fn aggregate_ranks(categories: &[CategoryRanks], k: usize) -> AnalogyResult {
    let mut overall = RankHistogram::new(k);
    let mut per_category = Vec::with_capacity(categories.len());
    let mut nonempty_mrr = Vec::new();
    for cat in categories {
        let mut hist = RankHistogram::new(k);
        cat.ranks.iter().for_each(|&r| hist.add(r));
        overall.merge(&hist);
        if hist.n > 0 {
            nonempty_mrr.push(hist.mrr());
        }
        per_category.push(CategoryScore {
            name: cat.name.clone(),
            n_questions: hist.n as usize,
            accuracy: hist.accuracy(),
            mrr: hist.mrr(),
        });
    }
    // sorted summation makes the mean independent of category order
    nonempty_mrr.sort_by(f64::total_cmp);
    let average_mrr = if nonempty_mrr.is_empty() {
        0.0
    } else {
        nonempty_mrr.iter().sum::<f64>() / nonempty_mrr.len() as f64
    };
    AnalogyResult {
        per_category,
        n_questions: overall.n as usize,
        overall_accuracy: overall.accuracy(),
        overall_mrr: overall.mrr(),
        average_mrr,
        k,
    }
}

/// Answers every question and aggregates accuracy / MRR.
///
/// The matrix is row-normalized on the fly if needed. Every question word
/// must be in the vocabulary; run [`AnalogyDataset::filter_to_vocab`] first.
pub fn evaluate<T: Scalar>(
    m: &EmbeddingMatrix<T>,
    ds: &AnalogyDataset,
    opts: EvalOptions,
) -> Result<AnalogyResult, AnalogyError> {
    if opts.k == 0 {
        return Err(AnalogyError::ZeroK);
    }
    let m: Cow<'_, EmbeddingMatrix<T>> = if m.is_normalized() {
        Cow::Borrowed(m)
    } else {
        Cow::Owned(m.normalize_rows().0)
    };

    let mut jobs = Vec::with_capacity(ds.n_questions());
    for (ci, cat) in ds.categories().iter().enumerate() {
        for (qi, q) in cat.questions.iter().enumerate() {
            let mut idx = [0usize; 4];
            for (slot, w) in idx.iter_mut().zip(q.words()) {
                *slot = m.vocab().index_of(w).ok_or_else(|| AnalogyError::MissingQuestionWord {
                    category: cat.name.clone(),
                    index: qi,
                    word: w.to_owned(),
                })?;
            }
            jobs.push((ci, idx));
        }
    }

    let rank_of = |&(_, [a, b, c, d]): &(usize, [usize; 4])| {
        solve_indices(&m, a, b, c, opts.k, opts.solve)
            .iter()
            .position(|cand| cand.index == d)
            .map(|p| p + 1)
    };
    let ranks: Vec<Option<usize>> = if opts.parallel {
        jobs.par_iter().map(rank_of).collect()
    } else {
        jobs.iter().map(rank_of).collect()
    };

    let mut per_cat: Vec<CategoryRanks> = ds
        .categories()
        .iter()
        .map(|c| CategoryRanks {
            name: c.name.clone(),
            ranks: Vec::with_capacity(c.questions.len()),
        })
        .collect();
    for ((ci, _), rank) in jobs.iter().zip(ranks) {
        per_cat[*ci].ranks.push(rank);
    }
    Ok(aggregate_ranks(&per_cat, opts.k))
}
