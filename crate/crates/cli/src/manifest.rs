//! Run manifests: what ran, on which inputs, with which settings.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use embedprobe::hashing::StableHasher;
use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    /// 64-bit FNV-1a content hash, hex.
    pub digest: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub started_unix: u64,
    pub duration_seconds: f64,
}

pub fn digest_file(path: &Path) -> std::io::Result<InputDigest> {
    let mut f = File::open(path)?;
    let mut h = StableHasher::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut bytes = 0u64;
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.write(&buf[..n]);
        bytes += n as u64;
    }
    Ok(InputDigest {
        path: path.display().to_string(),
        bytes,
        digest: format!("{:016x}", h.digest()),
    })
}

/// Collects manifest fields while a command runs.
pub struct ManifestBuilder {
    command: String,
    seed: u64,
    inputs: Vec<InputDigest>,
    start: Instant,
    started_unix: u64,
}

impl ManifestBuilder {
    pub fn start(command: impl Into<String>, seed: u64) -> Self {
        ManifestBuilder {
            command: command.into(),
            seed,
            inputs: Vec::new(),
            start: Instant::now(),
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(digest_file(path)?);
        Ok(())
    }

    pub fn finish(self, config: &BTreeMap<String, String>, outputs: Vec<String>) -> RunManifest {
        RunManifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            seed: self.seed,
            config: config.clone(),
            inputs: self.inputs,
            outputs,
            started_unix: self.started_unix,
            duration_seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_chunking_independent() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x");
        let data: Vec<u8> = (0..200_000u32).map(|i| (i % 251) as u8).collect();
        std::fs::write(&p, &data).unwrap();
        let d = digest_file(&p).unwrap();
        assert_eq!(d.bytes, 200_000);
        assert_eq!(d.digest, format!("{:016x}", embedprobe::hashing::content_digest(&data)));
    }
}
