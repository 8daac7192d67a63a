//! Fixture files and process helpers for driving the binary.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use embedprobe::analogy::AnalogyDataset;
use embedprobe::dump::{write_dump, InMemoryDump};
use embedprobe::probe::TaggedCorpus;
use embedprobe::store::save_word2vec_text;
use embedprobe::{EmbeddingMatrix, Scalar};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_embedprobe"))
}

/// Runs the binary with `args`, panicking with its stderr on spawn failure.
pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "embedprobe {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

pub fn write_embeddings<T: Scalar>(dir: &Path, name: &str, m: &EmbeddingMatrix<T>) -> PathBuf {
    let path = dir.join(name);
    save_word2vec_text(m, &path).unwrap();
    path
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn write_analogies(dir: &Path, name: &str, ds: &AnalogyDataset) -> PathBuf {
    let mut text = String::new();
    for c in ds.categories() {
        let _ = writeln!(text, ": {}", c.name);
        for q in &c.questions {
            let _ = writeln!(text, "{} {} {} {}", q.a, q.b, q.c, q.d);
        }
    }
    write_text(dir, name, &text)
}

pub fn write_conll(dir: &Path, name: &str, corpus: &TaggedCorpus) -> PathBuf {
    let mut text = String::from("# synthetic\n");
    for s in corpus.sentences() {
        for (w, t) in s.words.iter().zip(&s.tags) {
            let _ = writeln!(text, "{w}\t{t}");
        }
        text.push('\n');
    }
    write_text(dir, name, &text)
}

pub fn write_dump_file(dir: &Path, name: &str, d: &InMemoryDump) -> PathBuf {
    let path = dir.join(name);
    write_dump(&d.header, &d.records, &path).unwrap();
    path
}

/// Every file under `dir` except manifests, as (relative name, bytes).
pub fn report_payloads(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file() && !p.to_string_lossy().ends_with("manifest.json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}
