//! Directory layout: `<root>/images/<identity>/<frame>.png` with a matching
//! `<root>/labels/<identity>/<frame>.png`. Frames sort by numeric stem.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameFiles {
    pub frame_index: u64,
    pub image: PathBuf,
    pub label: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityFiles {
    pub identity_id: String,
    pub frames: Vec<FrameFiles>,
}

pub fn image_path(root: &Path, identity: &str, frame: &str) -> PathBuf {
    root.join("images").join(identity).join(format!("{frame}.png"))
}

pub fn label_path(root: &Path, identity: &str, frame: &str) -> PathBuf {
    root.join("labels").join(identity).join(format!("{frame}.png"))
}

/// List identities (sorted by folder name) and their frames. Label files are
/// not required to exist here; a missing one fails only that capture.
pub fn discover(root: &Path) -> Result<Vec<IdentityFiles>> {
    let images = root.join("images");
    if !images.is_dir() {
        return Err(Error::DatasetNotFound(root.to_path_buf()));
    }
    let mut ids: Vec<String> = fs::read_dir(&images)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .filter_map(|e| e.file_name().into_string().ok())
        .collect();
    ids.sort();

    let mut out = Vec::new();
    for id in ids {
        let mut frames = Vec::new();
        for entry in fs::read_dir(images.join(&id))? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("png") {
                continue;
            }
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            let frame_index: u64 = stem
                .parse()
                .map_err(|_| Error::BadDataset(format!("non-numeric frame name {}", path.display())))?;
            frames.push(FrameFiles {
                frame_index,
                label: label_path(root, &id, &stem),
                image: path,
            });
        }
        frames.sort_by_key(|f| f.frame_index);
        if let Some(w) = frames.windows(2).find(|w| w[0].frame_index == w[1].frame_index) {
            return Err(Error::BadDataset(format!(
                "identity {id} has two files for frame {}",
                w[0].frame_index
            )));
        }
        if !frames.is_empty() {
            out.push(IdentityFiles { identity_id: id, frames });
        }
    }
    if out.is_empty() {
        return Err(Error::DatasetNotFound(root.to_path_buf()));
    }
    Ok(out)
}
