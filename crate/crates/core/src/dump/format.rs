use std::borrow::Borrow;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::{DumpError, DumpHeader, SentenceRecord};

/// Value of the header's `format` field.
pub const FORMAT_TAG: &str = "ctxdump/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRecord {
    words: Vec<String>,
    subwords: usize,
    alignment: Vec<Vec<usize>>,
    vectors: String,
}

/// Streaming reader; holds at most one record at a time.
pub struct DumpReader<R> {
    reader: R,
    header: DumpHeader,
    line: String,
    index: usize,
}

pub fn read_dump(path: impl AsRef<Path>) -> Result<DumpReader<BufReader<File>>, DumpError> {
    DumpReader::new(BufReader::new(File::open(path)?))
}

impl<R: BufRead> DumpReader<R> {
    pub fn new(mut reader: R) -> Result<Self, DumpError> {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Err(DumpError::Header("empty file".into()));
        }
        let header: DumpHeader =
            serde_json::from_str(&line).map_err(|e| DumpError::Header(e.to_string()))?;
        if header.format != FORMAT_TAG {
            return Err(DumpError::Header(format!(
                "unsupported format {:?}, expected {FORMAT_TAG:?}",
                header.format
            )));
        }
        if header.dim == 0 {
            return Err(DumpError::Header("dim must be positive".into()));
        }
        Ok(DumpReader {
            reader,
            header,
            line,
            index: 0,
        })
    }

    pub fn header(&self) -> &DumpHeader {
        &self.header
    }

    fn decode(&self, line: &str) -> Result<SentenceRecord, DumpError> {
        let err = |message: String| DumpError::Record {
            index: self.index,
            message,
        };
        let wire: WireRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        let bytes = STANDARD
            .decode(wire.vectors.as_bytes())
            .map_err(|e| err(format!("bad base64: {e}")))?;
        let dim = self.header.dim;
        if bytes.len() != wire.subwords * dim * 4 {
            return Err(err(format!(
                "vector payload has {} bytes, expected {} subwords x {dim} floats",
                bytes.len(),
                wire.subwords
            )));
        }
        let vectors = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        SentenceRecord::new(wire.words, dim, vectors, wire.alignment).map_err(|e| match e {
            DumpError::Invalid(m) => err(m),
            other => other,
        })
    }
}

impl<R: BufRead> Iterator for DumpReader<R> {
    type Item = Result<SentenceRecord, DumpError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.line.clear();
        match self.reader.read_line(&mut self.line) {
            Ok(0) => None,
            Ok(_) => {
                let line = std::mem::take(&mut self.line);
                let rec = self.decode(&line);
                self.line = line;
                self.index += 1;
                Some(rec)
            }
            Err(e) => Some(Err(e.into())),
        }
    }
}

pub struct DumpWriter<W: Write> {
    out: W,
    dim: usize,
    written: usize,
}

impl<W: Write> DumpWriter<W> {
    pub fn new(mut out: W, header: &DumpHeader) -> Result<Self, DumpError> {
        if header.dim == 0 {
            return Err(DumpError::Header("dim must be positive".into()));
        }
        serde_json::to_writer(&mut out, header).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
        Ok(DumpWriter {
            out,
            dim: header.dim,
            written: 0,
        })
    }

    /// Validates against the header dimension, then appends one line.
    pub fn write_record(&mut self, rec: &SentenceRecord) -> Result<(), DumpError> {
        if rec.dim() != self.dim {
            return Err(DumpError::Record {
                index: self.written,
                message: format!("record dim {} differs from header dim {}", rec.dim(), self.dim),
            });
        }
        let mut bytes = Vec::with_capacity(rec.vectors().len() * 4);
        for x in rec.vectors() {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        let wire = WireRecord {
            words: rec.words().to_vec(),
            subwords: rec.n_subwords(),
            alignment: rec.alignment().to_vec(),
            vectors: STANDARD.encode(&bytes),
        };
        serde_json::to_writer(&mut self.out, &wire).map_err(std::io::Error::from)?;
        self.out.write_all(b"\n")?;
        self.written += 1;
        Ok(())
    }

    /// Flushes and returns the number of records written.
    pub fn finish(mut self) -> Result<usize, DumpError> {
        self.out.flush()?;
        Ok(self.written)
    }
}

pub fn write_dump<I>(header: &DumpHeader, records: I, path: impl AsRef<Path>) -> Result<usize, DumpError>
where
    I: IntoIterator,
    I::Item: Borrow<SentenceRecord>,
{
    let mut w = DumpWriter::new(BufWriter::new(File::create(path)?), header)?;
    for rec in records {
        w.write_record(rec.borrow())?;
    }
    w.finish()
}
