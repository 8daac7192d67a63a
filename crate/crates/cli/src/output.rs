//! Staged output files: everything is written next to its destination
//! under a temporary name and renamed only once the whole command succeeds.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;

#[derive(Default)]
pub struct Outputs {
    staged: Vec<(PathBuf, PathBuf)>,
}

fn partial_path(dest: &Path) -> PathBuf {
    let name = dest.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    dest.with_file_name(format!(".{name}.partial"))
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write(&mut self, dest: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
        self.write_with(dest, |w| Ok(w.write_all(bytes)?))
    }

    pub fn write_with(&mut self, dest: impl AsRef<Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let dest = dest.as_ref().to_path_buf();
        if let Some(parent) = dest.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        let tmp = partial_path(&dest);
        self.staged.push((tmp.clone(), dest));
        let mut w = BufWriter::new(File::create(&tmp)?);
        f(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        Ok(())
    }

    pub fn destinations(&self) -> Vec<String> {
        self.staged.iter().map(|(_, d)| d.display().to_string()).collect()
    }

    /// Moves every staged file into place. On failure the files already
    /// moved are removed again.
    pub fn commit(mut self) -> Result<Vec<PathBuf>> {
        let staged = std::mem::take(&mut self.staged);
        let mut done = Vec::with_capacity(staged.len());
        for (i, (tmp, dest)) in staged.iter().enumerate() {
            if let Err(e) = std::fs::rename(tmp, dest) {
                for d in &done {
                    let _ = std::fs::remove_file(d);
                }
                for (t, _) in &staged[i..] {
                    let _ = std::fs::remove_file(t);
                }
                return Err(e.into());
            }
            done.push(dest.clone());
        }
        Ok(done)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        for (tmp, _) in &self.staged {
            let _ = std::fs::remove_file(tmp);
        }
    }
}
