//! End-to-end pipeline behind the `iris-hmd` binary.
//!
//! Output layout under `output_dir`:
//!
//! ```text
//! metadata.csv                      one row per capture
//! normalized/<id>/<frame>.png       8-bit unrolled texture
//! masks/<id>/<frame>.png            1-bit iris mask
//! templates/<ENC>/<id>/<frame>.irc  packed iriscodes
//! splits.json                       reference / skipped / probe frames
//! gaps.csv                          sample-gap histogram per threshold
//! scores/<ENC>-<DIST>-imr<th>.csv   every probe/reference comparison
//! metrics/<ENC>-<DIST>-imr<th>.json
//! roc/<ENC>-<DIST>-imr<th>.csv
//! trust/sessions.csv                per-identity trust summary
//! trust/trajectories/*.csv          optional
//! bench.json
//! report.md
//! manifest.json                     config snapshot and content hashes
//! ```

use std::path::{Path, PathBuf};

pub mod bench;
pub mod config;
pub mod manifest;
pub mod prepare;
pub mod report;
pub mod trust;
pub mod verify;

pub use config::{default_settings, Overrides, RunConfig, Setting};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or flags. Exit code 1.
    Config(String),
    /// Missing or malformed input data. Exit code 2.
    Dataset(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Dataset(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Dataset(m) => write!(f, "dataset error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<iris_hmd::Error> for CliError {
    fn from(e: iris_hmd::Error) -> Self {
        match e {
            iris_hmd::Error::ParamMismatch(_) => CliError::Config(e.to_string()),
            _ => CliError::Dataset(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Dataset(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Dataset(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Dataset(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn capture_id(identity: &str, frame: u64) -> String {
    format!("{identity}/{frame}")
}

pub(crate) fn frame_stem(frame: u64) -> String {
    format!("{frame:06}")
}

pub(crate) fn normalized_path(out: &Path, identity: &str, frame: u64) -> PathBuf {
    out.join("normalized").join(identity).join(format!("{}.png", frame_stem(frame)))
}

pub(crate) fn mask_path(out: &Path, identity: &str, frame: u64) -> PathBuf {
    out.join("masks").join(identity).join(format!("{}.png", frame_stem(frame)))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub(crate) fn csv_writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}
