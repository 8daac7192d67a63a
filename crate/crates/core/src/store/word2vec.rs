//! word2vec text format: a `<count> <dim>` header line followed by one
//! `<word> <v1> ... <vdim>` line per row, single-space separated, LF endings.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use super::{is_word_token, EmbeddingMatrix, StoreError, Vocabulary};
use crate::scalar::{write_shortest, Scalar};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// NFC-normalize words before they enter the vocabulary.
    pub nfc: bool,
    /// Drop multiword and punctuation-only tokens (see [`is_word_token`]).
    pub words_only: bool,
}

pub fn load_word2vec_text<T: Scalar>(
    path: impl AsRef<Path>,
    opts: LoadOptions,
) -> Result<EmbeddingMatrix<T>, StoreError> {
    read_word2vec_text(BufReader::new(File::open(path)?), opts)
}

pub fn read_word2vec_text<T: Scalar, R: BufRead>(
    mut reader: R,
    opts: LoadOptions,
) -> Result<EmbeddingMatrix<T>, StoreError> {
    let mut line = String::new();
    let mut lineno = 1;
    read_line(&mut reader, &mut line, lineno)?;
    let (count, dim) = parse_header(strip_eol(&line), lineno)?;

    let mut vocab = Vocabulary::new();
    let mut values = Vec::with_capacity(count.min(1 << 20) * dim);
    let mut rows = 0;
    loop {
        lineno += 1;
        if read_line(&mut reader, &mut line, lineno)? == 0 {
            break;
        }
        if rows == count {
            return Err(StoreError::Format {
                line: lineno,
                message: format!("header declares {count} rows but more follow"),
            });
        }
        rows += 1;

        let content = strip_eol(&line).trim_end_matches(' ');
        let mut fields = content.split(' ');
        let raw_word = fields.next().unwrap_or_default();
        if raw_word.is_empty() {
            return Err(StoreError::Format {
                line: lineno,
                message: "missing word".into(),
            });
        }
        let start = values.len();
        for tok in fields {
            let x: T = tok.parse().map_err(|_| StoreError::Parse {
                line: lineno,
                token: tok.to_owned(),
            })?;
            if !x.is_finite() {
                return Err(StoreError::Parse {
                    line: lineno,
                    token: tok.to_owned(),
                });
            }
            values.push(x);
        }
        let found = values.len() - start;
        if found != dim {
            return Err(StoreError::Format {
                line: lineno,
                message: format!("expected {dim} values, found {found}"),
            });
        }

        let word = if opts.nfc {
            raw_word.nfc().collect::<String>()
        } else {
            raw_word.to_owned()
        };
        if opts.words_only && !is_word_token(&word) {
            values.truncate(start);
            continue;
        }
        vocab.push(word)?;
    }
    if rows != count {
        return Err(StoreError::Format {
            line: lineno,
            message: format!("header declares {count} rows, file has {rows}"),
        });
    }
    EmbeddingMatrix::new(vocab, dim, values)
}

/// Reads only the words of a word2vec text file. Row counts and widths are
/// still checked; values are not parsed.
pub fn load_word2vec_vocab(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Vocabulary, StoreError> {
    read_word2vec_vocab(BufReader::new(File::open(path)?), opts)
}

pub fn read_word2vec_vocab<R: BufRead>(mut reader: R, opts: LoadOptions) -> Result<Vocabulary, StoreError> {
    let mut line = String::new();
    let mut lineno = 1;
    read_line(&mut reader, &mut line, lineno)?;
    let (count, dim) = parse_header(strip_eol(&line), lineno)?;
    let mut vocab = Vocabulary::new();
    let mut rows = 0;
    loop {
        lineno += 1;
        if read_line(&mut reader, &mut line, lineno)? == 0 {
            break;
        }
        rows += 1;
        let mut fields = strip_eol(&line).trim_end_matches(' ').split(' ');
        let raw_word = fields.next().unwrap_or_default();
        let width = fields.count();
        if raw_word.is_empty() || width != dim {
            return Err(StoreError::Format {
                line: lineno,
                message: format!("expected a word and {dim} values"),
            });
        }
        let word = if opts.nfc {
            raw_word.nfc().collect::<String>()
        } else {
            raw_word.to_owned()
        };
        if !opts.words_only || is_word_token(&word) {
            vocab.push(word)?;
        }
    }
    if rows != count {
        return Err(StoreError::Format {
            line: lineno,
            message: format!("header declares {count} rows, file has {rows}"),
        });
    }
    Ok(vocab)
}

fn read_line<R: BufRead>(reader: &mut R, buf: &mut String, lineno: usize) -> Result<usize, StoreError> {
    buf.clear();
    reader.read_line(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::InvalidData => StoreError::Format {
            line: lineno,
            message: "invalid UTF-8".into(),
        },
        _ => StoreError::Io(e),
    })
}

fn strip_eol(line: &str) -> &str {
    let line = line.strip_suffix('\n').unwrap_or(line);
    line.strip_suffix('\r').unwrap_or(line)
}

fn parse_header(line: &str, lineno: usize) -> Result<(usize, usize), StoreError> {
    let bad = || StoreError::Format {
        line: lineno,
        message: format!("expected \"<count> <dim>\" header, found {line:?}"),
    };
    let mut parts = line.trim_end_matches(' ').split(' ');
    let count = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let dim: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    if dim == 0 {
        return Err(StoreError::ZeroDimension);
    }
    Ok((count, dim))
}

pub fn save_word2vec_text<T: Scalar>(
    m: &EmbeddingMatrix<T>,
    path: impl AsRef<Path>,
) -> Result<(), StoreError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_word2vec_text(m, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_word2vec_text<T: Scalar, W: Write + ?Sized>(
    m: &EmbeddingMatrix<T>,
    out: &mut W,
) -> Result<(), StoreError> {
    writeln!(out, "{} {}", m.len(), m.dim())?;
    let mut buf = String::new();
    for (word, row) in m.rows() {
        buf.clear();
        buf.push_str(word);
        for &x in row {
            buf.push(' ');
            write_shortest(&mut buf, x).expect("writing to a String cannot fail");
        }
        buf.push('\n');
        out.write_all(buf.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse<T: Scalar>(s: &str) -> Result<EmbeddingMatrix<T>, StoreError> {
        read_word2vec_text(s.as_bytes(), LoadOptions::default())
    }

    fn to_string<T: Scalar>(m: &EmbeddingMatrix<T>) -> String {
        let mut out = Vec::new();
        write_word2vec_text(m, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn loads_simple_file() {
        let m = parse::<f32>("2 3\na 1 0 0\nb 0 1 0\n").unwrap();
        assert_eq!(m.vocab().words(), ["a", "b"]);
        assert_eq!(m.values(), [1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(!m.is_normalized());
    }

    #[test]
    fn row_width_mismatch_names_line() {
        match parse::<f32>("1 2\na 1 0 0\n") {
            Err(StoreError::Format { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn row_count_mismatch() {
        assert!(matches!(parse::<f32>("3 1\na 1\nb 2\n"), Err(StoreError::Format { .. })));
        assert!(matches!(parse::<f32>("1 1\na 1\nb 2\n"), Err(StoreError::Format { line: 3, .. })));
    }

    #[test]
    fn non_finite_and_garbage_values() {
        assert!(matches!(parse::<f32>("1 2\na 1 inf\n"), Err(StoreError::Parse { line: 2, .. })));
        assert!(matches!(parse::<f64>("1 2\na NaN 1\n"), Err(StoreError::Parse { line: 2, .. })));
        assert!(matches!(parse::<f64>("1 1\na x\n"), Err(StoreError::Parse { line: 2, .. })));
        assert!(matches!(parse::<f64>("1 2\na 1e400 1\n"), Err(StoreError::Parse { .. })));
    }

    #[test]
    fn duplicate_word_named() {
        match parse::<f32>("2 1\na 1\na 2\n") {
            Err(StoreError::DuplicateWord { word }) => assert_eq!(word, "a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_header() {
        assert!(matches!(parse::<f32>("two 3\n"), Err(StoreError::Format { line: 1, .. })));
        assert!(matches!(parse::<f32>("1 2 3\n"), Err(StoreError::Format { line: 1, .. })));
        assert!(matches!(parse::<f32>(""), Err(StoreError::Format { line: 1, .. })));
    }

    #[test]
    fn tolerates_trailing_space_and_crlf() {
        let m = parse::<f32>("1 2\r\na 1 2 \r\n").unwrap();
        assert_eq!(m.values(), [1.0, 2.0]);
    }

    #[test]
    fn save_examples() {
        let m = EmbeddingMatrix::from_rows(1, [("a", vec![0.5f32])]).unwrap();
        assert_eq!(to_string(&m), "1 1\na 0.5\n");
        let empty = EmbeddingMatrix::<f32>::zeros(Vocabulary::new(), 3).unwrap();
        assert_eq!(to_string(&empty), "0 3\n");
        assert_eq!(parse::<f32>("0 3\n").unwrap(), empty);
    }

    #[test]
    fn vocab_only_reader_agrees() {
        let text = "3 2\nb 1 2\na, 3 4\nc 5 6\n";
        let opts = LoadOptions { words_only: true, nfc: false };
        let m: EmbeddingMatrix<f32> = read_word2vec_text(text.as_bytes(), opts).unwrap();
        assert_eq!(&read_word2vec_vocab(text.as_bytes(), opts).unwrap(), m.vocab());
        assert!(read_word2vec_vocab("2 2\nb 1 2\n".as_bytes(), opts).is_err());
        assert!(read_word2vec_vocab("1 2\nb 1\n".as_bytes(), opts).is_err());
    }

    #[test]
    fn nfc_option() {
        // "e" + combining acute vs. precomposed "é"
        let src = "1 1\ne\u{301} 1\n";
        let raw = parse::<f32>(src).unwrap();
        assert!(raw.get("\u{e9}").is_none());
        let m: EmbeddingMatrix<f32> =
            read_word2vec_text(src.as_bytes(), LoadOptions { nfc: true, ..Default::default() }).unwrap();
        assert!(m.get("\u{e9}").is_some());
    }

    #[test]
    fn words_only_option() {
        let src = "3 1\nalma 1\nNew_York 2\n, 3\n";
        let m: EmbeddingMatrix<f32> =
            read_word2vec_text(src.as_bytes(), LoadOptions { words_only: true, ..Default::default() })
                .unwrap();
        assert_eq!(m.vocab().words(), ["alma"]);
        assert_eq!(m.values(), [1.0]);
    }

    #[test]
    fn save_load_save_idempotent() {
        let src = "3 2\nx 0.1 -2.5e-9\ny 1e20 3\nz -0 7.000001\n";
        let first = to_string(&parse::<f32>(src).unwrap());
        let second = to_string(&parse::<f32>(&first).unwrap());
        assert_eq!(first, second);
    }

    fn finite_f32() -> impl Strategy<Value = f32> {
        any::<f32>().prop_filter("finite", |x| x.is_finite())
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(rows in proptest::collection::vec(proptest::collection::vec(finite_f32(), 4), 0..20)) {
            let m = EmbeddingMatrix::from_rows(4, rows.into_iter().enumerate().map(|(i, r)| (format!("w{i}"), r))).unwrap();
            let back = parse::<f32>(&to_string(&m)).unwrap();
            prop_assert_eq!(back.vocab(), m.vocab());
            let a: Vec<u32> = m.values().iter().map(|x| x.to_bits()).collect();
            let b: Vec<u32> = back.values().iter().map(|x| x.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }
}
