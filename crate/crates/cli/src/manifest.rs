use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use ringlab_core::config::RunConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileEntry {
    fn of(bytes: &[u8], path: String) -> Self {
        Self {
            path,
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        }
    }
}

/// Everything needed to re-run a command and check its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Full argument vector of the invocation.
    pub command: Vec<String>,
    pub seed: Option<u64>,
    pub config: Option<RunConfig>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub inputs: Vec<FileEntry>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileEntry>,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn new(config: Option<&RunConfig>, seed: Option<u64>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: std::env::args().collect(),
            seed,
            config: config.cloned(),
            started_unix: unix_now(),
            finished_unix: 0,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> anyhow::Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(FileEntry::of(&bytes, path.display().to_string()));
        Ok(())
    }

    /// Records a file already present in `dir`.
    pub fn add_output(&mut self, dir: &Path, name: &str) -> anyhow::Result<()> {
        let path = dir.join(name);
        let bytes = std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        self.outputs.push(FileEntry::of(&bytes, name.to_string()));
        Ok(())
    }

    pub fn write_output(&mut self, dir: &Path, name: &str, contents: &[u8]) -> anyhow::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(FileEntry::of(contents, name.to_string()));
        Ok(())
    }

    pub fn finish(mut self, dir: &Path) -> anyhow::Result<PathBuf> {
        self.finished_unix = unix_now();
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

pub fn create_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
