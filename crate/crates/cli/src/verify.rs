//! Protocol splits, encoding, all-pairs scoring and metrics per setting.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use iris_hmd::iriscode::template;
use iris_hmd::metrics::{evaluate, MetricsReport, ScoreSet};
use iris_hmd::normalize::load_pair;
use iris_hmd::protocol::{
    filter_probe_imrs, split_session, GapHistogram, IdentitySession, ProtocolSplit, SessionCapture, SplitManifest,
    GAP_BIN_LABELS,
};
use iris_hmd::{compare, encode, ComparisonScore, EncoderKind, Error, IrisCode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::manifest::{RunManifest, TreeHasher};
use crate::prepare::{load_metadata, CaptureRecord};
use crate::{capture_id, csv_writer, frame_stem, mask_path, normalized_path, write_json, CliError, CliResult};
use crate::{RunConfig, Setting};

pub const SPLITS_FILE: &str = "splits.json";
pub const GAPS_FILE: &str = "gaps.csv";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitsFile {
    pub n_ref: usize,
    pub n_skip: usize,
    pub identities: Vec<SplitManifest>,
    /// Identities with too few captures for the protocol.
    pub excluded: Vec<String>,
}

/// One line of a score dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub probe_id: String,
    pub reference_id: String,
    pub encoder: String,
    pub distance: f64,
    pub similarity: f64,
    pub shift_used: i32,
    pub overlap_bits: usize,
    pub genuine_flag: u8,
}

pub fn scores_path(out: &Path, setting: &Setting, th: f64) -> PathBuf {
    out.join("scores").join(format!("{}.csv", setting.stem(th)))
}

pub fn metrics_path(out: &Path, setting: &Setting, th: f64) -> PathBuf {
    out.join("metrics").join(format!("{}.json", setting.stem(th)))
}

pub fn roc_path(out: &Path, setting: &Setting, th: f64) -> PathBuf {
    out.join("roc").join(format!("{}.csv", setting.stem(th)))
}

fn template_path(out: &Path, kind: EncoderKind, identity: &str, frame: u64) -> PathBuf {
    out.join("templates")
        .join(kind.name())
        .join(identity)
        .join(format!("{}.irc", frame_stem(frame)))
}

fn rel(out: &Path, p: &Path) -> String {
    p.strip_prefix(out).unwrap_or(p).to_string_lossy().replace('\\', "/")
}

/// Sessions built from the metadata table; each capture holds its row index.
pub fn build_splits(
    records: &[CaptureRecord],
    n_ref: usize,
    n_skip: usize,
) -> CliResult<(Vec<ProtocolSplit<usize>>, Vec<String>)> {
    let mut by_id: BTreeMap<&str, Vec<SessionCapture<usize>>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_id.entry(&r.identity_id).or_default().push(SessionCapture {
            frame_index: r.frame_index,
            capture: i,
            imr: r.imr,
        });
    }
    let mut splits = Vec::new();
    let mut excluded = Vec::new();
    for (id, caps) in by_id {
        match split_session(IdentitySession::new(id, caps)?, n_ref, n_skip) {
            Ok(s) => splits.push(s),
            Err(Error::SessionTooShort { len, required }) => {
                eprintln!("warning: identity {id} has {len} captures (need more than {required}); excluded");
                excluded.push(id.to_string());
            }
            Err(e) => return Err(e.into()),
        }
    }
    if splits.is_empty() {
        return Err(CliError::Dataset("no identity has enough captures for the protocol".into()));
    }
    Ok((splits, excluded))
}

#[derive(Clone, Debug)]
pub struct VerifySummary {
    pub reports: Vec<MetricsReport>,
    pub gaps: Vec<(f64, GapHistogram)>,
    pub min_reference_imr: f64,
    pub identities: usize,
}

pub fn cmd_verify(config: &RunConfig) -> CliResult<VerifySummary> {
    config.validate()?;
    let out = &config.output_dir;
    let records = load_metadata(out)?;
    let (splits, excluded) = build_splits(&records, config.n_ref, config.n_skip)?;
    let mut manifest = RunManifest::open(out, config);

    write_json(
        &out.join(SPLITS_FILE),
        &SplitsFile {
            n_ref: config.n_ref,
            n_skip: config.n_skip,
            identities: splits.iter().map(|s| s.manifest()).collect(),
            excluded,
        },
    )?;
    manifest.record_file(out, SPLITS_FILE)?;

    // Captures that take part in comparisons: every probe and each selected reference.
    let mut needed: Vec<usize> = splits
        .iter()
        .flat_map(|s| {
            std::iter::once(s.selected_reference().capture).chain(s.probes.iter().map(|p| p.capture))
        })
        .filter(|&i| records[i].is_ok())
        .collect();
    needed.sort_unstable();

    let pairs: Vec<(usize, iris_hmd::NormalizedIris, iris_hmd::IrisMask)> = needed
        .par_iter()
        .map(|&i| {
            let r = &records[i];
            let tp = normalized_path(out, &r.identity_id, r.frame_index);
            let mp = mask_path(out, &r.identity_id, r.frame_index);
            if !tp.is_file() || !mp.is_file() {
                return Err(CliError::Dataset(format!(
                    "prepared data missing: {} (run `prepare` first)",
                    tp.display()
                )));
            }
            let (t, m) = load_pair(&tp, &mp)?;
            Ok((i, t, m))
        })
        .collect::<CliResult<_>>()?;

    let mut codes: BTreeMap<EncoderKind, Vec<Option<IrisCode>>> = BTreeMap::new();
    for kind in config.encoders_needed() {
        let encoded: Vec<(usize, IrisCode)> = pairs
            .par_iter()
            .map(|(i, t, m)| Ok((*i, encode(kind, t, m, &config.encoder_params)?)))
            .collect::<CliResult<_>>()?;
        let mut hasher = TreeHasher::default();
        let mut slots = vec![None; records.len()];
        for (i, code) in encoded {
            let r = &records[i];
            let path = template_path(out, kind, &r.identity_id, r.frame_index);
            std::fs::create_dir_all(path.parent().unwrap())?;
            let bytes = template::to_bytes(&code);
            std::fs::write(&path, &bytes)?;
            hasher.add(&rel(out, &path), &bytes);
            slots[i] = Some(code);
        }
        manifest.record_digest(&format!("templates/{}", kind.name()), hasher.finish());
        codes.insert(kind, slots);
    }

    // Gap analysis and kept probes per threshold.
    let mut gaps = Vec::new();
    let mut kept_by_th: Vec<Vec<Vec<usize>>> = Vec::new();
    for &th in &config.imr_thresholds {
        let mut total = GapHistogram::default();
        let mut kept = Vec::new();
        for s in &splits {
            let imrs: Vec<f64> = s.probes.iter().map(|p| p.imr).collect();
            let (k, h) = filter_probe_imrs(&imrs, th);
            total.merge(&h);
            kept.push(k);
        }
        gaps.push((th, total));
        kept_by_th.push(kept);
    }
    write_gaps(&out.join(GAPS_FILE), &gaps)?;
    manifest.record_file(out, GAPS_FILE)?;

    let ref_ids: Vec<String> = splits
        .iter()
        .map(|s| {
            let r = &records[s.selected_reference().capture];
            capture_id(&r.identity_id, r.frame_index)
        })
        .collect();

    let mut reports = Vec::new();
    for setting in config.settings() {
        if setting.encoder == EncoderKind::Csbca && setting.distance == iris_hmd::DistanceKind::Shd {
            eprintln!("note: CSBCA with SHD is evaluated but not a preferred setting");
        }
        let slots = &codes[&setting.encoder];
        let n_refs = ref_ids.len();
        // all probes against all references, computed once and filtered per threshold
        let jobs: Vec<(usize, usize, usize)> = splits
            .iter()
            .enumerate()
            .flat_map(|(pi, s)| (0..s.probes.len()).flat_map(move |j| (0..n_refs).map(move |ri| (pi, j, ri))))
            .collect();
        let scored: Vec<ComparisonScore> = jobs
            .par_iter()
            .map(|&(pi, j, ri)| {
                let probe = &slots[splits[pi].probes[j].capture];
                let reference = &slots[splits[ri].selected_reference().capture];
                match (probe, reference) {
                    (Some(a), Some(b)) => match compare(a, b, setting.distance, &config.matcher) {
                        Ok(s) => Ok(s),
                        Err(Error::InsufficientOverlap { .. }) => Ok(ComparisonScore::failed()),
                        Err(e) => Err(CliError::from(e)),
                    },
                    _ => Ok(ComparisonScore::failed()),
                }
            })
            .collect::<CliResult<_>>()?;
        let mut offsets = Vec::with_capacity(splits.len());
        let mut acc = 0;
        for s in &splits {
            offsets.push(acc);
            acc += s.probes.len() * n_refs;
        }

        for (ti, &th) in config.imr_thresholds.iter().enumerate() {
            let path = scores_path(out, &setting, th);
            let mut w = csv_writer(&path)?;
            let mut set = ScoreSet::default();
            for (pi, kept) in kept_by_th[ti].iter().enumerate() {
                for &j in kept {
                    let r = &records[splits[pi].probes[j].capture];
                    let probe_id = capture_id(&r.identity_id, r.frame_index);
                    for (ri, ref_id) in ref_ids.iter().enumerate() {
                        let s = scored[offsets[pi] + j * n_refs + ri];
                        let genuine = pi == ri;
                        if genuine {
                            set.genuine.push(s.similarity);
                        } else {
                            set.impostor.push(s.similarity);
                        }
                        w.serialize(ScoreRow {
                            probe_id: probe_id.clone(),
                            reference_id: ref_id.clone(),
                            encoder: setting.encoder.name().to_string(),
                            distance: s.distance,
                            similarity: s.similarity,
                            shift_used: s.shift_used,
                            overlap_bits: s.overlap_bits,
                            genuine_flag: genuine as u8,
                        })?;
                    }
                }
            }
            w.flush()?;
            drop(w);
            manifest.record_file(out, &rel(out, &path))?;

            let metrics = match evaluate(&set) {
                Ok(m) => m,
                Err(Error::EmptyScores) => {
                    eprintln!("warning: {} has no genuine or no impostor scores; metrics skipped", setting.stem(th));
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let mut roc = csv_writer(&roc_path(out, &setting, th))?;
            roc.write_record(["threshold", "fmr", "fnmr"])?;
            for p in &metrics.roc_points {
                roc.write_record([p.threshold.to_string(), p.fmr.to_string(), p.fnmr.to_string()])?;
            }
            roc.flush()?;
            let report = MetricsReport {
                encoder: setting.encoder.name().to_string(),
                distance_kind: setting.distance.name().to_string(),
                imr_threshold: th,
                metrics,
            };
            let mp = metrics_path(out, &setting, th);
            write_json(&mp, &report)?;
            manifest.record_file(out, &rel(out, &mp))?;
            reports.push(report);
        }
    }
    manifest.save(out)?;

    let min_reference_imr = splits
        .iter()
        .map(|s| s.selected_reference().imr)
        .fold(f64::INFINITY, f64::min);
    Ok(VerifySummary {
        reports,
        gaps,
        min_reference_imr,
        identities: splits.len(),
    })
}

fn write_gaps(path: &Path, gaps: &[(f64, GapHistogram)]) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["imr_threshold".to_string()];
    header.extend(GAP_BIN_LABELS.iter().map(|s| s.to_string()));
    header.extend(["Max SG", "leading_rejections", "trailing_rejections"].map(String::from));
    w.write_record(&header)?;
    for (th, h) in gaps {
        let mut row = vec![format!("{th:.2}")];
        row.extend(h.bins.iter().map(|b| b.to_string()));
        row.push(h.max_sg.to_string());
        row.push(h.leading_rejections.to_string());
        row.push(h.trailing_rejections.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_splits(out: &Path) -> CliResult<SplitsFile> {
    let path = out.join(SPLITS_FILE);
    let text = std::fs::read_to_string(&path)
        .map_err(|_| CliError::Dataset(format!("score dump missing: {} (run `verify` first)", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_scores(path: &Path) -> CliResult<Vec<ScoreRow>> {
    if !path.is_file() {
        return Err(CliError::Dataset(format!(
            "score dump missing: {} (run `verify` first)",
            path.display()
        )));
    }
    Ok(csv::Reader::from_path(path)?.deserialize().collect::<Result<_, _>>()?)
}

pub fn load_report(path: &Path) -> CliResult<MetricsReport> {
    let text = std::fs::read_to_string(path)
        .map_err(|_| CliError::Dataset(format!("metrics missing: {} (run `verify` first)", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}
