pub mod analogy;
pub mod extract;
pub mod probe;
pub mod vocab;

use std::path::{Path, PathBuf};

use clap::Args;

use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;
use crate::output::Outputs;
use crate::settings::Settings;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Base seed; every random stream is derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file or directory, depending on the command.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` settings file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    /// Loads the config file and applies `--seed` and `--out`.
    pub fn settings(&self, allowed: &'static [&'static str]) -> Result<(Settings, u64, PathBuf)> {
        let mut s = Settings::from_file(allowed, self.config.as_deref())?;
        s.set("seed", self.seed);
        s.set("out", self.out.as_ref().map(|p| p.display()));
        let seed = s.get("seed", 0u64)?;
        let out: String = s.require("out")?;
        Ok((s, seed, PathBuf::from(out)))
    }
}

/// `<file>.<suffix>` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{name}.{suffix}"))
}

pub fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Stages the manifest next to the other outputs and commits everything.
pub fn finish(mut outputs: Outputs, manifest_path: &Path, builder: ManifestBuilder, settings: &Settings) -> Result<()> {
    let manifest = builder.finish(settings.snapshot(), outputs.destinations());
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    outputs.write(manifest_path, json.as_bytes())?;
    outputs.commit()?;
    Ok(())
}

/// Records an input's digest, tagging failures with the path.
pub fn track_input(builder: &mut ManifestBuilder, path: &Path) -> Result<()> {
    builder.input(path).map_err(CliError::at(path))
}

/// CSV payload preceded by a comment line naming the manifest.
pub fn csv_with_manifest(manifest: &str, body: &str) -> String {
    format!("# manifest={manifest}\n{body}")
}
