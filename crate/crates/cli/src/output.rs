use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use georay::io::{write_atomic, FileSet};

/// Files for one command run, held in memory until everything has been
/// computed, then written together.
pub struct Outputs {
    dir: PathBuf,
    files: FileSet,
}

impl Outputs {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((self.path(name), bytes.into()));
    }

    pub fn add_json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }

    pub fn extend(&mut self, files: FileSet) {
        self.files.extend(files);
    }

    /// Write every file atomically. On failure, files written so far (and
    /// the directory, if this call created it) are removed.
    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let created = !self.dir.exists();
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let mut written = Vec::new();
        for (path, bytes) in &self.files {
            if let Err(e) = write_atomic(path, bytes) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                if created {
                    let _ = fs::remove_dir_all(&self.dir);
                }
                return Err(e).with_context(|| format!("writing {}", path.display()));
            }
            written.push(path.clone());
        }
        Ok(written)
    }
}
