use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use super::AnalogyError;
use crate::store::Vocabulary;

/// `a : b :: c : d`, with `d` the gold answer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AnalogyQuestion {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

impl AnalogyQuestion {
    pub fn new(a: &str, b: &str, c: &str, d: &str) -> Self {
        AnalogyQuestion {
            a: a.to_owned(),
            b: b.to_owned(),
            c: c.to_owned(),
            d: d.to_owned(),
        }
    }

    pub fn words(&self) -> [&str; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyCategory {
    pub name: String,
    pub questions: Vec<AnalogyQuestion>,
    /// Question count before any vocabulary filtering.
    pub original_count: usize,
}

/// One row of the original-vs-restricted question count table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterRow {
    pub category: String,
    pub original: usize,
    pub restricted: usize,
    /// `restricted / original`, 0 for an originally empty category.
    pub ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnalogyDataset {
    categories: Vec<AnalogyCategory>,
}

impl AnalogyDataset {
    /// Builds a dataset from `(name, questions)` pairs.
    pub fn new<I>(categories: I) -> Result<Self, AnalogyError>
    where
        I: IntoIterator<Item = (String, Vec<AnalogyQuestion>)>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (name, questions) in categories {
            if !seen.insert(name.clone()) {
                return Err(AnalogyError::DuplicateCategory(name));
            }
            if let Some(index) = questions
                .iter()
                .position(|q| q.words().iter().any(|w| w.is_empty()))
            {
                return Err(AnalogyError::EmptyWord {
                    category: name,
                    index,
                });
            }
            out.push(AnalogyCategory {
                original_count: questions.len(),
                name,
                questions,
            });
        }
        Ok(AnalogyDataset { categories: out })
    }

    pub fn categories(&self) -> &[AnalogyCategory] {
        &self.categories
    }

    pub fn n_questions(&self) -> usize {
        self.categories.iter().map(|c| c.questions.len()).sum()
    }

    /// Keeps questions whose four words are all in `vocab`. Empty categories
    /// are retained and original counts carried over.
    pub fn filter_to_vocab(&self, vocab: &Vocabulary) -> AnalogyDataset {
        let categories = self
            .categories
            .iter()
            .map(|cat| AnalogyCategory {
                name: cat.name.clone(),
                questions: cat
                    .questions
                    .iter()
                    .filter(|q| q.words().iter().all(|w| vocab.contains(w)))
                    .cloned()
                    .collect(),
                original_count: cat.original_count,
            })
            .collect();
        AnalogyDataset { categories }
    }

    /// Lowercases every question word.
    pub fn lowercased(&self) -> AnalogyDataset {
        let categories = self
            .categories
            .iter()
            .map(|cat| AnalogyCategory {
                name: cat.name.clone(),
                questions: cat
                    .questions
                    .iter()
                    .map(|q| AnalogyQuestion {
                        a: q.a.to_lowercase(),
                        b: q.b.to_lowercase(),
                        c: q.c.to_lowercase(),
                        d: q.d.to_lowercase(),
                    })
                    .collect(),
                original_count: cat.original_count,
            })
            .collect();
        AnalogyDataset { categories }
    }

    pub fn filter_report(&self) -> Vec<FilterRow> {
        self.categories
            .iter()
            .map(|c| FilterRow {
                category: c.name.clone(),
                original: c.original_count,
                restricted: c.questions.len(),
                ratio: if c.original_count == 0 {
                    0.0
                } else {
                    c.questions.len() as f64 / c.original_count as f64
                },
            })
            .collect()
    }
}

pub fn parse_analogy_file(path: impl AsRef<Path>) -> Result<AnalogyDataset, AnalogyError> {
    parse_analogy(BufReader::new(File::open(path)?))
}

/// Parses `: category` headers followed by four-word question lines.
/// Blank lines are ignored.
pub fn parse_analogy<R: BufRead>(reader: R) -> Result<AnalogyDataset, AnalogyError> {
    let mut categories: Vec<(String, Vec<AnalogyQuestion>)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => AnalogyError::Format {
                line: lineno,
                message: "invalid UTF-8".into(),
            },
            _ => AnalogyError::Io(e),
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix(':') {
            let name = name.trim();
            if name.is_empty() {
                return Err(AnalogyError::Format {
                    line: lineno,
                    message: "empty category name".into(),
                });
            }
            categories.push((name.to_owned(), Vec::new()));
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(AnalogyError::Format {
                line: lineno,
                message: format!("expected 4 words, found {}", tokens.len()),
            });
        }
        let (_, questions) = categories.last_mut().ok_or(AnalogyError::Format {
            line: lineno,
            message: "question before any category header".into(),
        })?;
        questions.push(AnalogyQuestion::new(tokens[0], tokens[1], tokens[2], tokens[3]));
    }
    AnalogyDataset::new(categories)
}
