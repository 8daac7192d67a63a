use std::path::{Path, PathBuf};

use clap::Args;
use embedprobe::hashing::derive_seed;
use embedprobe::probe::{
    grid_csv, load_conll, metrics_csv, sweep, AdamConfig, CorpusSplits, GridMetric, ProbeConfig, SweepResult,
    TaggedCorpus,
};
use embedprobe::store::{load_word2vec_text, LoadOptions};
use embedprobe::{Embeddings, OovPolicy, ProbeEmbeddings};
use serde_json::json;

use super::{csv_with_manifest, finish, track_input, CommonArgs};
use crate::chart::{render, Series};
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;
use crate::output::Outputs;

const KEYS: &[&str] = &[
    "seed",
    "out",
    "train",
    "dev",
    "test",
    "embeddings",
    "names",
    "hidden_sizes",
    "epochs",
    "batch_size",
    "dropout",
    "lr",
    "beta1",
    "beta2",
    "eps",
    "oov_mean",
    "oov_stddev",
    "max_len",
    "word_column",
    "tag_column",
    "chart_min_hidden",
    "parallel",
    "nfc",
];

const MANIFEST: &str = "manifest.json";

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Training split, tab-separated token rows.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Development split; enables best-dev reporting.
    #[arg(long)]
    pub dev: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// word2vec text file; repeat for several grid rows.
    #[arg(long = "embedding")]
    pub embeddings: Vec<PathBuf>,
    /// Row name per embedding (default: file stem).
    #[arg(long = "name")]
    pub names: Vec<String>,
    /// Comma-separated list (default 1,2,4,8,16,32,64).
    #[arg(long)]
    pub hidden_sizes: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub dropout: Option<f64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub oov_stddev: Option<f64>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub word_column: Option<usize>,
    #[arg(long)]
    pub tag_column: Option<usize>,
    /// Leave hidden sizes 1 and 2 out of the chart.
    #[arg(long)]
    pub chart_exclude_small: bool,
    /// Train sweep cells one after another.
    #[arg(long)]
    pub serial: bool,
}

fn load_split(path: &Path, word: usize, tag: usize, manifest: &mut ManifestBuilder) -> Result<TaggedCorpus> {
    track_input(manifest, path)?;
    let (corpus, warnings) = load_conll(path, word, tag).map_err(|e| CliError::at(path)(e.into()))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(corpus)
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "embedding".into())
}

pub fn run(args: &SweepArgs) -> Result<()> {
    let (mut s, seed, out) = args.common.settings(KEYS)?;
    s.set("train", args.train.as_ref().map(|p| p.display()));
    s.set("dev", args.dev.as_ref().map(|p| p.display()));
    s.set("test", args.test.as_ref().map(|p| p.display()));
    if !args.embeddings.is_empty() {
        let v: Vec<String> = args.embeddings.iter().map(|p| p.display().to_string()).collect();
        s.set("embeddings", Some(v.join(",")));
    }
    if !args.names.is_empty() {
        s.set("names", Some(args.names.join(",")));
    }
    s.set("hidden_sizes", args.hidden_sizes.as_ref());
    s.set("epochs", args.epochs);
    s.set("batch_size", args.batch_size);
    s.set("dropout", args.dropout);
    s.set("lr", args.lr);
    s.set("oov_stddev", args.oov_stddev);
    s.set("max_len", args.max_len);
    s.set("word_column", args.word_column);
    s.set("tag_column", args.tag_column);
    if args.chart_exclude_small {
        s.set("chart_min_hidden", Some(4));
    }
    if args.serial {
        s.set("parallel", Some(false));
    }

    let train_path = PathBuf::from(s.require::<String>("train")?);
    let dev_path = s.opt::<String>("dev")?.map(PathBuf::from);
    let test_path = PathBuf::from(s.require::<String>("test")?);
    let embeddings: Vec<PathBuf> = s
        .list::<String>("embeddings")?
        .unwrap_or_default()
        .into_iter()
        .map(PathBuf::from)
        .collect();
    if embeddings.is_empty() {
        return Err(CliError::config("probe sweep needs at least one embedding"));
    }
    let names: Vec<String> = match s.list::<String>("names")? {
        Some(n) if n.len() != embeddings.len() => {
            return Err(CliError::config(format!("{} names for {} embeddings", n.len(), embeddings.len())))
        }
        Some(n) => n,
        None => embeddings.iter().map(|p| stem(p)).collect(),
    };
    let sizes_raw = s.get("hidden_sizes", "1,2,4,8,16,32,64".to_owned())?;
    s.set("hidden_sizes", Some(sizes_raw));
    let hidden_sizes = s.list::<usize>("hidden_sizes")?.unwrap_or_default();
    if hidden_sizes.is_empty() || hidden_sizes.contains(&0) {
        return Err(CliError::config("hidden sizes must be a nonempty list of positive integers"));
    }

    let d = ProbeConfig::default();
    let da = AdamConfig::default();
    let oov_mean = s.get("oov_mean", 0.0f64)?;
    let oov_stddev = s.get("oov_stddev", 0.6f64)?;
    let oov = OovPolicy::new(oov_mean, oov_stddev, derive_seed(seed, "oov"))
        .ok_or_else(|| CliError::config("oov_stddev must be positive and finite"))?;
    let cfg = ProbeConfig {
        hidden_size: d.hidden_size,
        dropout: s.get("dropout", d.dropout)?,
        epochs: s.get("epochs", d.epochs)?,
        batch_size: s.get("batch_size", d.batch_size)?,
        adam: AdamConfig {
            lr: s.get("lr", da.lr)?,
            beta1: s.get("beta1", da.beta1)?,
            beta2: s.get("beta2", da.beta2)?,
            eps: s.get("eps", da.eps)?,
        },
        oov,
        seed: derive_seed(seed, "probe"),
        max_len: s.get("max_len", d.max_len)?,
        input_dim: None,
    };
    cfg.validate()?;
    let word_column = s.get("word_column", 0usize)?;
    let tag_column = s.get("tag_column", 1usize)?;
    let chart_min_hidden = s.get("chart_min_hidden", 1usize)?;
    let parallel = s.get("parallel", true)?;
    let load_opts = LoadOptions {
        nfc: s.get("nfc", false)?,
        words_only: false,
    };

    let mut manifest = ManifestBuilder::start("probe sweep", seed);
    let train = load_split(&train_path, word_column, tag_column, &mut manifest)?;
    let dev = match &dev_path {
        Some(p) => Some(load_split(p, word_column, tag_column, &mut manifest)?),
        None => None,
    };
    let test = load_split(&test_path, word_column, tag_column, &mut manifest)?;
    let splits = CorpusSplits { train, dev, test };

    let mut results: Vec<(String, SweepResult)> = Vec::with_capacity(embeddings.len());
    for (path, name) in embeddings.iter().zip(&names) {
        track_input(&mut manifest, path)?;
        let m: Embeddings = load_word2vec_text(path, load_opts).map_err(|e| CliError::at(path)(e.into()))?;
        let m: ProbeEmbeddings = m.cast();
        let r = sweep(&splits, &m, &hidden_sizes, &cfg, parallel)?;
        for (h, e) in r.failures() {
            eprintln!("error: {name}, hidden size {h}: {e}");
        }
        results.push((name.clone(), r));
    }

    let rows: Vec<(&str, &SweepResult)> = results.iter().map(|(n, r)| (n.as_str(), r)).collect();
    let mut outputs = Outputs::new();
    outputs.write(
        out.join("grid.csv"),
        csv_with_manifest(MANIFEST, &grid_csv(&rows, GridMetric::FinalEpoch)).as_bytes(),
    )?;
    if splits.dev.is_some() {
        outputs.write(
            out.join("grid_best_dev.csv"),
            csv_with_manifest(MANIFEST, &grid_csv(&rows, GridMetric::BestDev)).as_bytes(),
        )?;
    }
    let mut cells_json = Vec::new();
    let mut series = Vec::new();
    for (name, r) in &results {
        outputs.write(
            out.join(format!("metrics_{name}.csv")),
            csv_with_manifest(MANIFEST, &metrics_csv(r)).as_bytes(),
        )?;
        series.push(Series {
            name: name.clone(),
            points: r.completed().map(|c| (c.hidden_size, c.final_test_accuracy)).collect(),
        });
        for (h, c) in &r.cells {
            cells_json.push(match c {
                Ok(cell) => json!({ "embedding": name, "cell": cell }),
                Err(e) => json!({ "embedding": name, "hidden_size": h, "error": e.to_string() }),
            });
        }
    }
    let report = json!({
        "manifest": MANIFEST,
        "hidden_sizes": hidden_sizes,
        "tagset": splits.train.tagset(),
        "cells": cells_json,
    });
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    outputs.write(out.join("sweep.json"), text.as_bytes())?;
    outputs.write(out.join("chart.svg"), render(&series, chart_min_hidden, MANIFEST).as_bytes())?;
    finish(outputs, &out.join(MANIFEST), manifest, &s)?;

    for (name, r) in &results {
        let accs: Vec<String> = r
            .cells
            .iter()
            .map(|(h, c)| match c {
                Ok(c) => format!("{h}:{:.2}", 100.0 * c.final_test_accuracy),
                Err(_) => format!("{h}:failed"),
            })
            .collect();
        println!("{name} {}", accs.join(" "));
    }
    let failed: usize = results.iter().map(|(_, r)| r.failures().count()).sum();
    if failed > 0 {
        let total = results.len() * hidden_sizes.len();
        return Err(CliError::PartialSweep { failed, total });
    }
    Ok(())
}
