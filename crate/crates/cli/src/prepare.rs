//! Ingest, label clean-up, circle fitting and unrolling of every capture.

use std::path::Path;

use iris_hmd::dataset::{self, FrameFiles};
use iris_hmd::{
    compute_imr, fit_eye_geometry, iris_box, load_capture, refine_labels, unroll, EyeCapture, IrisMask,
    NormalizedIris, NormalizedSize,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::manifest::{RunManifest, TreeHasher};
use crate::{csv_writer, mask_path, normalized_path, CliError, CliResult, RunConfig};

pub const METADATA_FILE: &str = "metadata.csv";

/// One row of `metadata.csv`. Geometry columns are empty for failed captures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptureRecord {
    pub identity_id: String,
    pub frame_index: u64,
    pub imr: f64,
    pub pupil_x: Option<f64>,
    pub pupil_y: Option<f64>,
    pub pupil_radius: Option<f64>,
    pub iris_radius: Option<f64>,
    pub box_min_x: Option<u32>,
    pub box_min_y: Option<u32>,
    pub box_max_x: Option<u32>,
    pub box_max_y: Option<u32>,
    pub error: Option<String>,
}

impl CaptureRecord {
    fn failed(identity_id: &str, frame_index: u64, tag: &str) -> Self {
        Self {
            identity_id: identity_id.to_string(),
            frame_index,
            imr: 0.0,
            pupil_x: None,
            pupil_y: None,
            pupil_radius: None,
            iris_radius: None,
            box_min_x: None,
            box_min_y: None,
            box_max_x: None,
            box_max_y: None,
            error: Some(tag.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Clean up labels, fit circles and unroll one capture.
pub fn process_capture(
    capture: &EyeCapture,
    size: NormalizedSize,
) -> Result<(CaptureRecord, NormalizedIris, IrisMask), iris_hmd::Error> {
    let labels = refine_labels(&capture.labels);
    let refined = EyeCapture::new(
        capture.identity_id.clone(),
        capture.frame_index,
        capture.image.clone(),
        labels,
    )?;
    let geometry = fit_eye_geometry(&refined.labels)?;
    let bbox = iris_box(&refined.labels)?;
    let (texture, mask) = unroll(&refined, &geometry, size)?;
    let record = CaptureRecord {
        identity_id: capture.identity_id.clone(),
        frame_index: capture.frame_index,
        imr: compute_imr(&mask).imr,
        pupil_x: Some(geometry.pupil_center.0),
        pupil_y: Some(geometry.pupil_center.1),
        pupil_radius: Some(geometry.pupil_radius),
        iris_radius: Some(geometry.iris_radius),
        box_min_x: Some(bbox.min_x),
        box_min_y: Some(bbox.min_y),
        box_max_x: Some(bbox.max_x),
        box_max_y: Some(bbox.max_y),
        error: None,
    };
    Ok((record, texture, mask))
}

fn prepare_one(identity: &str, files: &FrameFiles, out: &Path, size: NormalizedSize) -> CliResult<CaptureRecord> {
    let result = load_capture(&files.image, &files.label, identity, files.frame_index)
        .and_then(|cap| process_capture(&cap, size));
    match result {
        Ok((record, texture, mask)) => {
            let tp = normalized_path(out, identity, files.frame_index);
            let mp = mask_path(out, identity, files.frame_index);
            std::fs::create_dir_all(tp.parent().unwrap())?;
            std::fs::create_dir_all(mp.parent().unwrap())?;
            iris_hmd::normalize::save_pair(&texture, &mask, &tp, &mp)?;
            Ok(record)
        }
        Err(e) => Ok(CaptureRecord::failed(identity, files.frame_index, e.tag())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrepareSummary {
    pub identities: usize,
    pub captures: usize,
    pub failures: usize,
}

pub fn cmd_prepare(config: &RunConfig) -> CliResult<PrepareSummary> {
    config.validate()?;
    let out = &config.output_dir;
    let ids = dataset::discover(&config.dataset_root)?;
    let jobs: Vec<(&str, &FrameFiles)> = ids
        .iter()
        .flat_map(|id| id.frames.iter().map(move |f| (id.identity_id.as_str(), f)))
        .collect();
    let records: Vec<CaptureRecord> = jobs
        .par_iter()
        .map(|(id, f)| prepare_one(id, f, out, config.normalized_dims))
        .collect::<CliResult<_>>()?;

    let mut w = csv_writer(&out.join(METADATA_FILE))?;
    for r in &records {
        w.serialize(r)?;
    }
    w.flush()?;

    let mut manifest = RunManifest::open(out, config);
    manifest.record_file(out, METADATA_FILE)?;
    let mut hasher = TreeHasher::default();
    for r in records.iter().filter(|r| r.is_ok()) {
        for path in [
            normalized_path(out, &r.identity_id, r.frame_index),
            mask_path(out, &r.identity_id, r.frame_index),
        ] {
            let rel = path.strip_prefix(out).unwrap_or(&path).to_string_lossy().into_owned();
            hasher.add(&rel, &std::fs::read(&path)?);
        }
    }
    manifest.record_digest("normalized+masks", hasher.finish());
    manifest.save(out)?;

    Ok(PrepareSummary {
        identities: ids.len(),
        captures: records.len(),
        failures: records.iter().filter(|r| !r.is_ok()).count(),
    })
}

pub fn load_metadata(out: &Path) -> CliResult<Vec<CaptureRecord>> {
    let path = out.join(METADATA_FILE);
    if !path.is_file() {
        return Err(CliError::Dataset(format!(
            "prepared data missing: {} (run `prepare` first)",
            path.display()
        )));
    }
    let mut rows: Vec<CaptureRecord> = csv::Reader::from_path(&path)?
        .deserialize()
        .collect::<Result<_, _>>()?;
    rows.sort_by(|a, b| (&a.identity_id, a.frame_index).cmp(&(&b.identity_id, b.frame_index)));
    Ok(rows)
}
