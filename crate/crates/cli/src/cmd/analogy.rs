use std::path::PathBuf;

use clap::Args;
use embedprobe::analogy::{
    evaluate, filter_report_csv, parse_analogy_file, result_csv, AnalogyMethod, EvalOptions, SolveOptions,
};
use embedprobe::store::{load_word2vec_text, read_vocab_file, LoadOptions};
use embedprobe::Embeddings;
use serde_json::json;

use super::{csv_with_manifest, finish, track_input, CommonArgs};
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;
use crate::output::Outputs;

const KEYS: &[&str] = &[
    "seed",
    "out",
    "embedding",
    "dataset",
    "vocab",
    "k",
    "method",
    "include_query_words",
    "lowercase",
    "nfc",
    "words_only",
    "parallel",
];

const MANIFEST: &str = "manifest.json";

#[derive(Debug, Args)]
pub struct AnalogyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// word2vec text file.
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Analogy questions, `: category` headers followed by `a b c d` lines.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Restrict the embeddings to this word list first.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Rank cutoff for MRR (default 10).
    #[arg(long)]
    pub k: Option<usize>,
    /// `cosadd` (default) or `cosmul`.
    #[arg(long)]
    pub method: Option<String>,
    /// Let a, b and c compete as answers.
    #[arg(long)]
    pub include_query_words: bool,
    /// Lowercase the questions before filtering.
    #[arg(long)]
    pub lowercase: bool,
    #[arg(long)]
    pub nfc: bool,
    #[arg(long)]
    pub words_only: bool,
    /// Evaluate on a single thread.
    #[arg(long)]
    pub serial: bool,
}

pub fn eval(args: &AnalogyArgs) -> Result<()> {
    let (mut s, seed, out) = args.common.settings(KEYS)?;
    s.set("embedding", args.embedding.as_ref().map(|p| p.display()));
    s.set("dataset", args.dataset.as_ref().map(|p| p.display()));
    s.set("vocab", args.vocab.as_ref().map(|p| p.display()));
    s.set("k", args.k);
    s.set("method", args.method.as_ref());
    s.set_flag("include_query_words", args.include_query_words);
    s.set_flag("lowercase", args.lowercase);
    s.set_flag("nfc", args.nfc);
    s.set_flag("words_only", args.words_only);
    if args.serial {
        s.set("parallel", Some(false));
    }
    let embedding = PathBuf::from(s.require::<String>("embedding")?);
    let dataset = PathBuf::from(s.require::<String>("dataset")?);
    let vocab = s.opt::<String>("vocab")?.map(PathBuf::from);
    let k = s.get("k", 10usize)?;
    let method = match s.get("method", "cosadd".to_owned())?.as_str() {
        "cosadd" => AnalogyMethod::CosAdd,
        "cosmul" => AnalogyMethod::CosMul,
        other => return Err(CliError::config(format!("unknown method {other:?}; use cosadd or cosmul"))),
    };
    let opts = EvalOptions {
        k,
        solve: SolveOptions {
            method,
            exclude_query_words: !s.get("include_query_words", false)?,
        },
        parallel: s.get("parallel", true)?,
    };
    let load = LoadOptions {
        nfc: s.get("nfc", false)?,
        words_only: s.get("words_only", false)?,
    };
    let lowercase = s.get("lowercase", false)?;

    let mut manifest = ManifestBuilder::start("analogy eval", seed);
    track_input(&mut manifest, &embedding)?;
    track_input(&mut manifest, &dataset)?;
    let mut m: Embeddings = load_word2vec_text(&embedding, load).map_err(|e| CliError::at(&embedding)(e.into()))?;
    if let Some(v) = &vocab {
        track_input(&mut manifest, v)?;
        let words = read_vocab_file(v).map_err(|e| CliError::at(v)(e.into()))?;
        m = m.restrict(&words)?;
    }
    let (m, zero_rows) = m.normalize_rows();
    if zero_rows > 0 {
        eprintln!("warning: {zero_rows} zero rows in the embedding matrix");
    }
    let mut ds = parse_analogy_file(&dataset).map_err(|e| CliError::at(&dataset)(e.into()))?;
    if lowercase {
        ds = ds.lowercased();
    }
    let ds = ds.filter_to_vocab(m.vocab());
    let result = evaluate(&m, &ds, opts)?;

    let mut outputs = Outputs::new();
    outputs.write(out.join("results.csv"), csv_with_manifest(MANIFEST, &result_csv(&result)).as_bytes())?;
    let report = json!({
        "manifest": MANIFEST,
        "method": method,
        "exclude_query_words": opts.solve.exclude_query_words,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    outputs.write(out.join("results.json"), text.as_bytes())?;
    outputs.write(
        out.join("filter_report.csv"),
        csv_with_manifest(MANIFEST, &filter_report_csv(&ds.filter_report())).as_bytes(),
    )?;
    finish(outputs, &out.join(MANIFEST), manifest, &s)?;
    println!(
        "questions {}  accuracy {:.4}  overall_mrr {:.4}  average_mrr {:.4}",
        result.n_questions, result.overall_accuracy, result.overall_mrr, result.average_mrr
    );
    Ok(())
}
