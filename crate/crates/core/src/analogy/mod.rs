//! Word-analogy benchmark: parsing, vocabulary filtering, 3CosAdd/3CosMul
//! answering and accuracy / MRR aggregation.

mod dataset;
mod eval;
mod report;
mod solve;

pub use dataset::{
    parse_analogy, parse_analogy_file, AnalogyCategory, AnalogyDataset, AnalogyQuestion, FilterRow,
};
pub use eval::{aggregate_ranks, evaluate, AnalogyResult, CategoryRanks, CategoryScore, EvalOptions};
pub use report::{filter_report_csv, result_csv};
pub use solve::{solve_analogy, solve_indices, AnalogyMethod, Candidate, SolveOptions};

use thiserror::Error;

use crate::store::StoreError;

#[derive(Debug, Error)]
pub enum AnalogyError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("duplicate category {0:?}")]
    DuplicateCategory(String),
    #[error("question {index} of category {category:?} has an empty word")]
    EmptyWord { category: String, index: usize },
    #[error("word {0:?} is not in the embedding vocabulary")]
    MissingWord(String),
    #[error("question {index} of category {category:?}: word {word:?} is not in the embedding vocabulary")]
    MissingQuestionWord {
        category: String,
        index: usize,
        word: String,
    },
    #[error("embedding rows must be L2-normalized before solving")]
    NotNormalized,
    #[error("rank cutoff k must be positive")]
    ZeroK,
    #[error(transparent)]
    Store(#[from] StoreError),
}
