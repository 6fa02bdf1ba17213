//! Genuine and impostor trust sessions per identity, driven by the score dumps.

use std::collections::HashMap;
use std::path::Path;

use iris_hmd::trust::{run_session, Frame, Scenario, SessionReport, TrustConfig};
use serde::{Deserialize, Serialize};

use crate::prepare::load_metadata;
use crate::verify::{load_report, load_scores, load_splits, metrics_path, scores_path};
use crate::{capture_id, csv_writer, write_json, CliError, CliResult, RunConfig};

pub const SESSIONS_FILE: &str = "trust/sessions.csv";
pub const THRESHOLDS_FILE: &str = "trust/thresholds.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub imr_threshold: f64,
    /// EER threshold of the trust setting, clamped to `[0, 1]`.
    #[serde(rename = "T")]
    pub threshold: f64,
}

#[derive(Clone, Debug)]
pub struct IdentityTrust {
    pub identity_id: String,
    /// One report per IMR threshold.
    pub genuine: Vec<SessionReport>,
    /// Empty when the dataset has a single identity.
    pub impostor: Vec<SessionReport>,
}

#[derive(Clone, Debug)]
pub struct TrustSummary {
    pub points: Vec<OperatingPoint>,
    pub identities: Vec<IdentityTrust>,
}

fn column_label(scenario: &str, th: f64) -> String {
    format!("{scenario}-IMR{th:.1}")
}

pub fn cmd_trust(config: &RunConfig) -> CliResult<TrustSummary> {
    config.validate()?;
    let out = &config.output_dir;
    let setting = config.trust_setting;
    let splits = load_splits(out)?;
    let records = load_metadata(out)?;
    let imr: HashMap<String, f64> = records
        .iter()
        .map(|r| (capture_id(&r.identity_id, r.frame_index), r.imr))
        .collect();
    let ids: Vec<&str> = splits.identities.iter().map(|s| s.identity_id.as_str()).collect();
    let ref_ids: Vec<String> = splits
        .identities
        .iter()
        .map(|s| capture_id(&s.identity_id, s.selected_reference_frame))
        .collect();
    let probes: Vec<Vec<String>> = splits
        .identities
        .iter()
        .map(|s| s.probe_frames.iter().map(|&f| capture_id(&s.identity_id, f)).collect())
        .collect();
    if ids.len() < 2 {
        eprintln!("warning: single identity; impostor sessions are empty");
    }

    let mut points = Vec::new();
    let mut per_id: Vec<IdentityTrust> = ids
        .iter()
        .map(|id| IdentityTrust {
            identity_id: id.to_string(),
            genuine: Vec::new(),
            impostor: Vec::new(),
        })
        .collect();

    for &th in &config.imr_thresholds {
        let mpath = metrics_path(out, &setting, th);
        let t = if ids.len() < 2 && !mpath.is_file() {
            // no impostor scores, so no EER threshold to borrow
            eprintln!("warning: no metrics for {}; using configured T", setting.stem(th));
            config.trust.threshold
        } else {
            load_report(&mpath)?.metrics.eer_threshold.clamp(0.0, 1.0)
        };
        points.push(OperatingPoint {
            imr_threshold: th,
            threshold: t,
        });
        let rows = load_scores(&scores_path(out, &setting, th))?;
        let cs: HashMap<(&str, &str), f64> = rows
            .iter()
            .map(|r| ((r.probe_id.as_str(), r.reference_id.as_str()), r.similarity))
            .collect();
        let trust = TrustConfig {
            threshold: t,
            imr_threshold: th,
            ..config.trust.clone()
        };
        let frames_for = |probe_list: &[String], reference: &str| -> CliResult<Vec<Frame>> {
            probe_list
                .iter()
                .map(|p| {
                    let q = *imr.get(p).ok_or_else(|| CliError::Dataset(format!("{p} missing from metadata")))?;
                    let score = cs.get(&(p.as_str(), reference)).copied();
                    if q >= th && score.is_none() {
                        return Err(CliError::Dataset(format!(
                            "score dump for {} lacks the pair ({p}, {reference})",
                            setting.stem(th)
                        )));
                    }
                    Ok(Frame { imr: q, cs: score })
                })
                .collect()
        };

        for (i, entry) in per_id.iter_mut().enumerate() {
            let frames = frames_for(&probes[i], &ref_ids[i])?;
            let g = run_session(ids[i], Scenario::Genuine, &frames, &trust)?;
            write_trajectory(out, config, &g, &probes[i], th)?;
            entry.genuine.push(g);
            if ids.len() > 1 {
                let others: Vec<String> = (0..ids.len())
                    .filter(|&j| j != i)
                    .flat_map(|j| probes[j].iter().cloned())
                    .collect();
                let frames = frames_for(&others, &ref_ids[i])?;
                let imp = run_session(ids[i], Scenario::Impostor, &frames, &trust)?;
                write_trajectory(out, config, &imp, &others, th)?;
                entry.impostor.push(imp);
            }
        }
    }

    write_sessions(out, config, &per_id)?;
    write_json(&out.join(THRESHOLDS_FILE), &points)?;
    let mut manifest = crate::manifest::RunManifest::open(out, config);
    manifest.record_file(out, SESSIONS_FILE)?;
    manifest.save(out)?;
    Ok(TrustSummary {
        points,
        identities: per_id,
    })
}

fn write_sessions(out: &Path, config: &RunConfig, rows: &[IdentityTrust]) -> CliResult<()> {
    let ths = &config.imr_thresholds;
    let lockout = config.trust.lockout_enabled;
    let mut header = vec!["identity".to_string()];
    header.extend(ths.iter().map(|&t| column_label("Gen", t)));
    header.extend(ths.iter().map(|&t| column_label("Imp", t)));
    if lockout {
        header.extend(ths.iter().map(|&t| format!("TTL-{}", column_label("Gen", t))));
        header.extend(ths.iter().map(|&t| format!("TTL-{}", column_label("Imp", t))));
    }
    let mut w = csv_writer(&out.join(SESSIONS_FILE))?;
    w.write_record(&header)?;
    let fmt_pct = |v: f64| format!("{v:.2}");
    let ttl = |r: &SessionReport| r.time_to_lockout.map(|f| f.to_string()).unwrap_or_default();
    for r in rows {
        let mut row = vec![r.identity_id.clone()];
        row.extend(r.genuine.iter().map(|g| fmt_pct(g.pct_below_threshold)));
        if r.impostor.is_empty() {
            row.extend(ths.iter().map(|_| String::new()));
        } else {
            row.extend(r.impostor.iter().map(|g| fmt_pct(g.pct_above_threshold)));
        }
        if lockout {
            row.extend(r.genuine.iter().map(ttl));
            if r.impostor.is_empty() {
                row.extend(ths.iter().map(|_| String::new()));
            } else {
                row.extend(r.impostor.iter().map(ttl));
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_trajectory(
    out: &Path,
    config: &RunConfig,
    report: &SessionReport,
    probe_ids: &[String],
    th: f64,
) -> CliResult<()> {
    if !config.write_trajectories {
        return Ok(());
    }
    let tag = match report.scenario {
        Scenario::Genuine => "Gen",
        Scenario::Impostor => "Imp",
    };
    let path = out
        .join("trust/trajectories")
        .join(format!("{}-{tag}-imr{th:.2}.csv", report.identity_id));
    let mut w = csv_writer(&path)?;
    w.write_record(["frame_index", "tv", "probe_id"])?;
    for (k, tv) in report.trajectory.iter().enumerate() {
        w.write_record([k.to_string(), tv.to_string(), probe_ids[k].clone()])?;
    }
    w.flush()?;
    Ok(())
}
