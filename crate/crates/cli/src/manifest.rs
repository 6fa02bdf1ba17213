use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{write_json, CliResult, RunConfig};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    /// Artifact path (relative to the output dir) to SHA-256 hex digest.
    pub artifacts: BTreeMap<String, String>,
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex(&Sha256::digest(data))
}

/// Accumulates a digest over several files in a fixed order.
#[derive(Default)]
pub struct TreeHasher(Sha256);

impl TreeHasher {
    pub fn add(&mut self, name: &str, data: &[u8]) {
        self.0.update((name.len() as u64).to_le_bytes());
        self.0.update(name.as_bytes());
        self.0.update((data.len() as u64).to_le_bytes());
        self.0.update(data);
    }

    pub fn finish(self) -> String {
        hex(&self.0.finalize())
    }
}

impl RunManifest {
    /// Load the manifest in `out`, or start a fresh one. The config snapshot
    /// is always replaced by `config`.
    pub fn open(out: &Path, config: &RunConfig) -> Self {
        let mut m: RunManifest = std::fs::read_to_string(out.join(MANIFEST_FILE))
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok())
            .unwrap_or_default();
        m.tool = "iris-hmd".into();
        m.version = env!("CARGO_PKG_VERSION").into();
        m.config = config.clone();
        m
    }

    pub fn record_file(&mut self, out: &Path, rel: &str) -> CliResult<()> {
        let data = std::fs::read(out.join(rel))?;
        self.artifacts.insert(rel.to_string(), sha256_hex(&data));
        Ok(())
    }

    pub fn record_digest(&mut self, rel: &str, digest: String) {
        self.artifacts.insert(rel.to_string(), digest);
    }

    pub fn save(&self, out: &Path) -> CliResult<()> {
        write_json(&out.join(MANIFEST_FILE), self)
    }
}
