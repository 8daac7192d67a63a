//! Static embedding tables: vocabularies, dense matrices, word2vec text
//! interchange and deterministic out-of-vocabulary vectors.

mod matrix;
mod oov;
mod vocab;
mod word2vec;

pub use matrix::EmbeddingMatrix;
pub use oov::OovPolicy;
pub use vocab::{intersect_vocabularies, is_word_token, read_vocab_file, write_vocab_file, Vocabulary};
pub use word2vec::{
    load_word2vec_text, load_word2vec_vocab, read_word2vec_text, read_word2vec_vocab, save_word2vec_text,
    write_word2vec_text, LoadOptions,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: cannot parse {token:?} as a finite number")]
    Parse { line: usize, token: String },
    #[error("duplicate word {word:?}")]
    DuplicateWord { word: String },
    #[error("word {0:?} is not in the vocabulary")]
    MissingWord(String),
    #[error("at least one vocabulary is required")]
    NoVocabularies,
    #[error("embedding dimension must be positive")]
    ZeroDimension,
    #[error("expected {expected} values, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}
