use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::ProbeError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSentence {
    pub words: Vec<String>,
    pub tags: Vec<String>,
}

/// Tag-sequence corpus; the tagset lists tags in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaggedCorpus {
    sentences: Vec<TaggedSentence>,
    tagset: Vec<String>,
}

impl TaggedCorpus {
    pub fn new(sentences: Vec<TaggedSentence>) -> Result<Self, ProbeError> {
        let mut tagset: Vec<String> = Vec::new();
        for (i, s) in sentences.iter().enumerate() {
            if s.words.len() != s.tags.len() {
                return Err(ProbeError::Data(format!(
                    "sentence {i} has {} words but {} tags",
                    s.words.len(),
                    s.tags.len()
                )));
            }
            for t in &s.tags {
                if !tagset.contains(t) {
                    tagset.push(t.clone());
                }
            }
        }
        Ok(TaggedCorpus { sentences, tagset })
    }

    /// Convenience constructor from parallel word/tag slices.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(Vec<S>, Vec<S>)]) -> Result<Self, ProbeError> {
        let own = |v: &Vec<S>| v.iter().map(|s| s.as_ref().to_owned()).collect();
        Self::new(
            pairs
                .iter()
                .map(|(w, t)| TaggedSentence {
                    words: own(w),
                    tags: own(t),
                })
                .collect(),
        )
    }

    pub fn sentences(&self) -> &[TaggedSentence] {
        &self.sentences
    }

    pub fn tagset(&self) -> &[String] {
        &self.tagset
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn n_tokens(&self) -> usize {
        self.sentences.iter().map(|s| s.words.len()).sum()
    }
}

pub fn load_conll(
    path: impl AsRef<Path>,
    word_column: usize,
    tag_column: usize,
) -> Result<(TaggedCorpus, Vec<String>), ProbeError> {
    read_conll(BufReader::new(File::open(path)?), word_column, tag_column)
}

/// Reads tab-separated token rows. Blank lines end sentences and `#` lines
/// are comments. Returns the corpus and any warnings.
pub fn read_conll<R: BufRead>(
    reader: R,
    word_column: usize,
    tag_column: usize,
) -> Result<(TaggedCorpus, Vec<String>), ProbeError> {
    let mut sentences = Vec::new();
    let mut current = TaggedSentence {
        words: Vec::new(),
        tags: Vec::new(),
    };
    let flush = |cur: &mut TaggedSentence, out: &mut Vec<TaggedSentence>| {
        if !cur.words.is_empty() {
            out.push(std::mem::replace(
                cur,
                TaggedSentence {
                    words: Vec::new(),
                    tags: Vec::new(),
                },
            ));
        }
    };
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => ProbeError::Format {
                line: lineno,
                message: "invalid UTF-8".into(),
            },
            _ => ProbeError::Io(e),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut current, &mut sentences);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let need = word_column.max(tag_column) + 1;
        if cols.len() < need {
            return Err(ProbeError::Format {
                line: lineno,
                message: format!("expected at least {need} tab-separated columns, found {}", cols.len()),
            });
        }
        current.words.push(cols[word_column].to_owned());
        current.tags.push(cols[tag_column].to_owned());
    }
    flush(&mut current, &mut sentences);
    let mut warnings = Vec::new();
    if sentences.is_empty() {
        warnings.push("corpus contains no sentences".to_owned());
    }
    Ok((TaggedCorpus::new(sentences)?, warnings))
}
