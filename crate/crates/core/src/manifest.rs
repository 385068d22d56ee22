//! `manifest.json`: everything needed to rerun a command and check its outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const MANIFEST_FORMAT: &str = "graphss-manifest-v1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: String,
    pub command: String,
    /// Command-line arguments after the program name, minus `--out-dir`.
    pub args: Vec<String>,
    pub config: ExperimentConfig,
    pub config_sha256: String,
    pub seed: u64,
    /// Child seeds by role, derived from `seed`.
    pub derived_seeds: BTreeMap<String, u64>,
    pub inputs: Vec<FileDigest>,
    /// Reproducible outputs with their digests.
    pub outputs: Vec<FileDigest>,
    /// Outputs holding wall-clock measurements.
    pub timing_outputs: Vec<String>,
    pub created_unix_seconds: u64,
    pub elapsed_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_digest(path: &Path, label: impl Into<String>) -> Result<FileDigest> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(FileDigest {
        path: label.into(),
        sha256: sha256_hex(&bytes),
    })
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    sha256_hex(cfg.to_json().as_bytes())
}

impl Manifest {
    pub fn new(command: &str, args: Vec<String>, config: &ExperimentConfig) -> Self {
        let derived_seeds = ["dataset", "partition", "noise", "train", "subgraphs", "attack", "gibbs", "outer"]
            .iter()
            .map(|r| (r.to_string(), config.stream_seed(r, 0)))
            .collect();
        Manifest {
            format: MANIFEST_FORMAT.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            args,
            config: config.clone(),
            config_sha256: config_hash(config),
            seed: config.seed,
            derived_seeds,
            inputs: Vec::new(),
            outputs: Vec::new(),
            timing_outputs: Vec::new(),
            created_unix_seconds: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            elapsed_seconds: 0.0,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Manifest = serde_json::from_str(&text)?;
        if m.format != MANIFEST_FORMAT {
            return Err(Error::invalid(format!("unknown manifest format `{}`", m.format)));
        }
        Ok(m)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
