use std::path::PathBuf;

use clap::Args;
use embedprobe::store::{intersect_vocabularies, load_word2vec_vocab, LoadOptions};

use super::{finish, sibling, track_input, CommonArgs};
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;
use crate::output::Outputs;

const KEYS: &[&str] = &["seed", "out", "inputs", "words_only", "nfc"];

#[derive(Debug, Args)]
pub struct IntersectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Drop multiword and punctuation-only tokens before intersecting.
    #[arg(long)]
    pub words_only: bool,
    /// NFC-normalize words.
    #[arg(long)]
    pub nfc: bool,
    /// word2vec text files.
    pub inputs: Vec<PathBuf>,
}

pub fn intersect(args: &IntersectArgs) -> Result<()> {
    let (mut s, seed, out) = args.common.settings(KEYS)?;
    if !args.inputs.is_empty() {
        let joined: Vec<String> = args.inputs.iter().map(|p| p.display().to_string()).collect();
        s.set("inputs", Some(joined.join(",")));
    }
    s.set_flag("words_only", args.words_only);
    s.set_flag("nfc", args.nfc);
    let inputs: Vec<PathBuf> = s.list::<String>("inputs")?.unwrap_or_default().into_iter().map(PathBuf::from).collect();
    if inputs.is_empty() {
        return Err(CliError::config("vocab intersect needs at least one input"));
    }
    let opts = LoadOptions {
        words_only: s.get("words_only", false)?,
        nfc: s.get("nfc", false)?,
    };

    let mut manifest = ManifestBuilder::start("vocab intersect", seed);
    let mut vocabs = Vec::with_capacity(inputs.len());
    for p in &inputs {
        track_input(&mut manifest, p)?;
        vocabs.push(load_word2vec_vocab(p, opts).map_err(|e| CliError::at(p)(e.into()))?);
    }
    let common = intersect_vocabularies(vocabs.iter())?;

    let mut outputs = Outputs::new();
    outputs.write_with(&out, |w| {
        for word in common.iter() {
            writeln!(w, "{word}")?;
        }
        Ok(())
    })?;
    finish(outputs, &sibling(&out, "manifest.json"), manifest, &s)?;
    println!("{}", common.len());
    Ok(())
}
