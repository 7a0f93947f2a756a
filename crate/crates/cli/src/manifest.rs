//! Run directories and their manifests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Task};
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    /// Halted on request; `resume` continues it.
    Partial,
    FailedVerification,
}

/// Where a halted time integration stands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub t_ref: f64,
    pub k: u64,
    pub snapshot: String,
    pub snapshots_written: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub task: Task,
    pub status: RunStatus,
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub progress: Option<Progress>,
    /// Relative path to SHA-256 of the contents.
    pub files: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn read(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fails on the first listed file whose contents changed.
    pub fn verify_files(&self, dir: &Path) -> Result<(), CliError> {
        for (rel, sum) in &self.files {
            let bytes = std::fs::read(dir.join(rel))
                .map_err(|e| CliError::Checksum(format!("{rel}: {e}")))?;
            if &sha256_hex(&bytes) != sum {
                return Err(CliError::Checksum(format!("{rel}: contents differ from the manifest")));
            }
        }
        Ok(())
    }
}

/// Output directory that records a checksum for every file it writes.
pub struct RunDir {
    root: PathBuf,
    files: BTreeMap<String, String>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), files: BTreeMap::new() })
    }

    /// Continues a directory whose manifest lists `files`.
    pub fn reopen(root: &Path, files: BTreeMap<String, String>) -> Self {
        Self { root: root.to_path_buf(), files }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `rel` (forward slashes) and records its checksum.
    pub fn write(&mut self, rel: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.files.insert(rel.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    pub fn finish(
        self,
        task: Task,
        status: RunStatus,
        config: &RunConfig,
        progress: Option<Progress>,
    ) -> Result<Manifest, CliError> {
        let m = Manifest { task, status, config: config.clone(), progress, files: self.files };
        let path = self.root.join(MANIFEST);
        std::fs::write(&path, m.render()).map_err(|e| CliError::io(&path, e))?;
        Ok(m)
    }
}
