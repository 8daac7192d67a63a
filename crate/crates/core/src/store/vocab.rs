use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::StoreError;

/// Ordered set of words with O(1) index lookup.
///
/// Matching is byte-wise on UTF-8; no case folding or normalization happens here.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary in iteration order, rejecting duplicates.
    pub fn from_words<I, S>(words: I) -> Result<Self, StoreError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::new();
        for w in words {
            vocab.push(w)?;
        }
        Ok(vocab)
    }

    /// Appends a word and returns its index.
    pub fn push(&mut self, word: impl Into<String>) -> Result<usize, StoreError> {
        let word = word.into();
        if self.index.contains_key(&word) {
            return Err(StoreError::DuplicateWord { word });
        }
        let idx = self.words.len();
        self.index.insert(word.clone(), idx);
        self.words.push(word);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, idx: usize) -> &str {
        &self.words[idx]
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Words present in every input, ordered by their position in the first one.
pub fn intersect_vocabularies<'a, I>(vocabs: I) -> Result<Vocabulary, StoreError>
where
    I: IntoIterator<Item = &'a Vocabulary>,
{
    let mut iter = vocabs.into_iter();
    let first = iter.next().ok_or(StoreError::NoVocabularies)?;
    let rest: Vec<&Vocabulary> = iter.collect();
    let words = first
        .iter()
        .filter(|w| rest.iter().all(|v| v.contains(w)))
        .map(str::to_owned);
    Vocabulary::from_words(words)
}

/// False for multiword phrase tokens (joined with `_`) and for tokens made
/// only of punctuation or symbols.
pub fn is_word_token(word: &str) -> bool {
    !word.contains('_') && word.chars().any(char::is_alphanumeric)
}

/// Reads a one-word-per-line vocabulary file. Blank lines are skipped.
pub fn read_vocab_file(path: impl AsRef<Path>) -> Result<Vocabulary, StoreError> {
    let reader = BufReader::new(File::open(path)?);
    let mut vocab = Vocabulary::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| StoreError::Format {
            line: i + 1,
            message: e.to_string(),
        })?;
        let word = line.trim_end_matches('\r');
        if word.is_empty() {
            continue;
        }
        vocab.push(word)?;
    }
    Ok(vocab)
}

/// Writes one word per line, LF-terminated.
pub fn write_vocab_file(vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<(), StoreError> {
    let mut w = BufWriter::new(File::create(path)?);
    for word in vocab.iter() {
        w.write_all(word.as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use proptest::prelude::*;

    fn v(words: &[&str]) -> Vocabulary {
        Vocabulary::from_words(words.iter().copied()).unwrap()
    }

    #[test]
    fn index_matches_position() {
        let vocab = v(&["a", "b", "c"]);
        for (i, w) in vocab.iter().enumerate() {
            assert_eq!(vocab.index_of(w), Some(i));
        }
        assert_eq!(vocab.index_of("d"), None);
    }

    #[test]
    fn duplicates_rejected() {
        let err = Vocabulary::from_words(["a", "b", "a"]).unwrap_err();
        assert!(matches!(err, StoreError::DuplicateWord { word } if word == "a"));
    }

    #[test]
    fn intersection_examples() {
        let got = intersect_vocabularies([&v(&["a", "b", "c"]), &v(&["b", "c", "d"])]).unwrap();
        assert_eq!(got.words(), ["b", "c"]);
        let single = v(&["a", "b"]);
        assert_eq!(intersect_vocabularies([&single]).unwrap(), single);
        assert!(matches!(
            intersect_vocabularies(std::iter::empty()),
            Err(StoreError::NoVocabularies)
        ));
    }

    #[test]
    fn intersection_keeps_first_order() {
        let got = intersect_vocabularies([&v(&["c", "a", "b"]), &v(&["a", "b", "c"])]).unwrap();
        assert_eq!(got.words(), ["c", "a", "b"]);
    }

    #[test]
    fn word_token_filter() {
        assert!(is_word_token("kutya"));
        assert!(is_word_token("Budapest2"));
        assert!(!is_word_token("New_York"));
        assert!(!is_word_token("..."));
        assert!(!is_word_token("—"));
    }

    #[test]
    fn vocab_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.txt");
        let vocab = v(&["alma", "körte", "szilva"]);
        write_vocab_file(&vocab, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "alma\nkörte\nszilva\n");
        assert_eq!(read_vocab_file(&path).unwrap(), vocab);
    }

    fn vocab_strategy() -> impl Strategy<Value = Vocabulary> {
        proptest::collection::btree_set("[a-e]{1,2}", 0..12).prop_map(|set| {
            // btree order is sorted; reverse to exercise non-sorted inputs too
            Vocabulary::from_words(set.into_iter().rev()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn intersection_is_idempotent(a in vocab_strategy()) {
            prop_assert_eq!(intersect_vocabularies([&a, &a]).unwrap(), a);
        }

        #[test]
        fn intersection_commutes_up_to_order(a in vocab_strategy(), b in vocab_strategy()) {
            let ab: HashSet<String> = intersect_vocabularies([&a, &b]).unwrap().words().iter().cloned().collect();
            let ba: HashSet<String> = intersect_vocabularies([&b, &a]).unwrap().words().iter().cloned().collect();
            prop_assert_eq!(ab, ba);
        }
    }
}
