use std::path::PathBuf;

use clap::{Args, Subcommand};
use embedprobe::dump::{DumpFile, SentenceSource};
use embedprobe::extract::{
    extract_aggregate, extract_decontextualized, train_x2static, Extraction, OccurrenceScope, X2StaticConfig,
};
use embedprobe::hashing::derive_seed;
use embedprobe::store::{read_vocab_file, write_word2vec_text};
use embedprobe::{Embeddings, Vocabulary};
use serde_json::{json, Value};

use super::{file_name, finish, sibling, track_input, CommonArgs};
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;
use crate::output::Outputs;
use crate::settings::Settings;

const DE_KEYS: &[&str] = &["seed", "out", "dump", "vocab", "expect_dim"];
const AGG_KEYS: &[&str] = &["seed", "out", "dump", "vocab", "expect_dim", "cap", "scope"];
const X2_KEYS: &[&str] = &[
    "seed",
    "out",
    "dump",
    "vocab",
    "expect_dim",
    "dim",
    "window",
    "negatives",
    "epochs",
    "lr0",
    "neg_exponent",
    "min_count",
];

#[derive(Debug, Subcommand)]
pub enum ExtractCmd {
    /// Mean of each word's subword vectors from single-word records.
    De(InputArgs),
    /// Mean over every occurrence of each word in a sentence dump.
    Agg(AggArgs),
    /// Distilled static vectors trained with negative sampling.
    X2(X2Args),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Contextual vector dump.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Word list, one word per line.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Fail unless the dump has this dimension.
    #[arg(long)]
    pub expect_dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AggArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Use at most this many occurrences per word.
    #[arg(long)]
    pub cap: Option<u64>,
    /// `word` (default) or `sentence`.
    #[arg(long)]
    pub scope: Option<String>,
}

#[derive(Debug, Args)]
pub struct X2Args {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr0: Option<f64>,
    #[arg(long)]
    pub neg_exponent: Option<f64>,
    #[arg(long)]
    pub min_count: Option<u64>,
}

struct Prepared {
    settings: Settings,
    seed: u64,
    out: PathBuf,
    dump: DumpFile,
    vocab: Vocabulary,
    manifest: ManifestBuilder,
}

fn prepare(args: &InputArgs, keys: &'static [&'static str], method: &str, extra: impl FnOnce(&mut Settings)) -> Result<Prepared> {
    let (mut s, seed, out) = args.common.settings(keys)?;
    s.set("dump", args.dump.as_ref().map(|p| p.display()));
    s.set("vocab", args.vocab.as_ref().map(|p| p.display()));
    s.set("expect_dim", args.expect_dim);
    extra(&mut s);
    let dump_path = PathBuf::from(s.require::<String>("dump")?);
    let vocab_path = PathBuf::from(s.require::<String>("vocab")?);
    let mut manifest = ManifestBuilder::start(format!("extract {method}"), seed);
    track_input(&mut manifest, &dump_path)?;
    track_input(&mut manifest, &vocab_path)?;
    let dump = DumpFile::open(&dump_path).map_err(|e| CliError::at(&dump_path)(e.into()))?;
    if let Some(d) = s.opt::<usize>("expect_dim")? {
        if d != dump.header().dim {
            return Err(CliError::config(format!(
                "dump has dimension {} but expect_dim is {d}",
                dump.header().dim
            )));
        }
    }
    let vocab = read_vocab_file(&vocab_path).map_err(|e| CliError::at(&vocab_path)(e.into()))?;
    Ok(Prepared {
        settings: s,
        seed,
        out,
        dump,
        vocab,
        manifest,
    })
}

/// Writes the matrix, its metadata sidecar and the manifest.
fn write_all(p: Prepared, method: &str, ex: Extraction<f32>, extra: Value) -> Result<()> {
    let manifest_path = sibling(&p.out, "manifest.json");
    let meta = json!({
        "manifest": file_name(&manifest_path),
        "method": method,
        "config": p.settings.snapshot(),
        "dump_header": p.dump.header(),
        "rows": ex.matrix.len(),
        "dim": ex.matrix.dim(),
        "uncovered": ex.uncovered,
        "details": extra,
    });
    let mut outputs = Outputs::new();
    outputs.write_with(&p.out, |w| Ok(write_word2vec_text(&ex.matrix, w)?))?;
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    outputs.write(sibling(&p.out, "meta.json"), text.as_bytes())?;
    if !ex.uncovered.is_empty() {
        eprintln!("warning: {} words have no vectors and were written as zeros", ex.uncovered.len());
    }
    println!("{} x {}", ex.matrix.len(), ex.matrix.dim());
    finish(outputs, &manifest_path, p.manifest, &p.settings)
}

fn to_f32(ex: Extraction<f64>) -> Extraction<f32> {
    let matrix: Embeddings = ex.matrix.cast();
    Extraction {
        matrix,
        uncovered: ex.uncovered,
    }
}

pub fn run(cmd: &ExtractCmd) -> Result<()> {
    match cmd {
        ExtractCmd::De(args) => {
            let p = prepare(args, DE_KEYS, "de", |_| {})?;
            let ex = extract_decontextualized::<f64>(&p.dump, &p.vocab)?;
            write_all(p, "de", to_f32(ex), Value::Null)
        }
        ExtractCmd::Agg(args) => {
            let mut p = prepare(&args.input, AGG_KEYS, "agg", |s| {
                s.set("cap", args.cap);
                s.set("scope", args.scope.as_ref());
            })?;
            let cap = p.settings.opt::<u64>("cap")?;
            let scope = match p.settings.get("scope", "word".to_owned())?.as_str() {
                "word" => OccurrenceScope::Word,
                "sentence" => OccurrenceScope::Sentence,
                other => return Err(CliError::config(format!("unknown scope {other:?}; use word or sentence"))),
            };
            let ex = extract_aggregate::<f64>(&p.dump, &p.vocab, cap, scope)?;
            write_all(p, "agg", to_f32(ex), json!({ "cap": cap, "scope": scope }))
        }
        ExtractCmd::X2(args) => {
            let mut p = prepare(&args.input, X2_KEYS, "x2", |s| {
                s.set("dim", args.dim);
                s.set("window", args.window);
                s.set("negatives", args.negatives);
                s.set("epochs", args.epochs);
                s.set("lr0", args.lr0);
                s.set("neg_exponent", args.neg_exponent);
                s.set("min_count", args.min_count);
            })?;
            let d = X2StaticConfig::default();
            let s = &mut p.settings;
            let cfg = X2StaticConfig {
                dim: s.opt("dim")?,
                window: s.get("window", d.window)?,
                negatives: s.get("negatives", d.negatives)?,
                epochs: s.get("epochs", d.epochs)?,
                lr0: s.get("lr0", d.lr0)?,
                neg_exponent: s.get("neg_exponent", d.neg_exponent)?,
                min_count: s.get("min_count", d.min_count)?,
                seed: derive_seed(p.seed, "x2static"),
            };
            let out = train_x2static::<f32>(&p.dump, &p.vocab, &cfg)?;
            let details = json!({
                "config": cfg,
                "epoch_losses": out.epoch_losses,
                "updates": out.updates,
            });
            write_all(p, "x2", out.extraction, details)
        }
    }
}
