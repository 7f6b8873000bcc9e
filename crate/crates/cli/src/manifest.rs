//! Machine-readable run manifest: enough to rerun and reproduce any output.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Fully-resolved parameters of the run.
    pub params: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    /// Relative paths written, sorted.
    pub outputs: Vec<String>,
}

pub fn digest_inputs(paths: &[PathBuf]) -> Result<Vec<InputDigest>> {
    paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p).with_context(|| format!("reading input {}", p.display()))?;
            let mut hasher = Sha256::new();
            hasher.update(&bytes);
            Ok(InputDigest {
                path: p.display().to_string(),
                sha256: hex::encode(hasher.finalize()),
                bytes: bytes.len() as u64,
            })
        })
        .collect()
}

/// Collects artifacts under one output directory and records their names.
pub struct OutDir {
    dir: PathBuf,
    written: BTreeSet<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(OutDir { dir: dir.to_path_buf(), written: BTreeSet::new() })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents.as_ref())
            .with_context(|| format!("writing {}", path.display()))?;
        self.written.insert(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).context("serializing JSON artifact")?;
        text.push('\n');
        self.write(name, text)
    }

    /// Write `manifest.json` including itself in the output list.
    pub fn finish(mut self, command: &str, params: serde_json::Value, inputs: Vec<InputDigest>) -> Result<()> {
        self.written.insert("manifest.json".to_string());
        let manifest = Manifest {
            tool: "retvol",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            params,
            inputs,
            outputs: self.written.iter().cloned().collect(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).context("serializing manifest")?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
