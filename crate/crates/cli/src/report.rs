//! Markdown summary of whatever stages have been run.

use std::fmt::Write as _;

use crate::bench::{render_bench, BenchReport, BENCH_FILE};
use crate::trust::SESSIONS_FILE;
use crate::verify::{load_report, load_splits, metrics_path, GAPS_FILE};
use crate::{CliError, CliResult, RunConfig};

pub const REPORT_FILE: &str = "report.md";

fn csv_as_table(path: &std::path::Path) -> CliResult<Option<String>> {
    if !path.is_file() {
        return Ok(None);
    }
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let mut s = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    for rec in r.records() {
        let rec = rec?;
        let cells: Vec<&str> = rec.iter().collect();
        let _ = writeln!(s, "| {} |", cells.join(" | "));
    }
    Ok(Some(s))
}

pub fn cmd_report(config: &RunConfig) -> CliResult<String> {
    config.validate()?;
    let out = &config.output_dir;
    let splits = load_splits(out)?;
    let ths = &config.imr_thresholds;

    let mut s = String::from("# Verification summary\n\n");
    let _ = writeln!(
        s,
        "{} identities, {} references per pool, {} skipped.\n",
        splits.identities.len(),
        splits.n_ref,
        splits.n_skip
    );
    if let Some(min) = splits
        .identities
        .iter()
        .map(|i| i.selected_reference_imr)
        .min_by(f64::total_cmp)
    {
        let _ = writeln!(s, "Lowest IMR among selected references: {min:.4}\n");
    }

    s += "| setting |";
    for t in ths {
        let _ = write!(s, " EER@{t:.1} | FMR10@{t:.1} | AUC@{t:.1} | T@{t:.1} |");
    }
    s += "\n|---|";
    s += &"---:|".repeat(4 * ths.len());
    s += "\n";
    for setting in config.settings() {
        let _ = write!(s, "| {setting} |");
        for &t in ths {
            match load_report(&metrics_path(out, &setting, t)) {
                Ok(r) => {
                    let m = &r.metrics;
                    let _ = write!(s, " {:.4} | {:.4} | {:.4} | {:.4} |", m.eer, m.fmr10, m.auc, m.eer_threshold);
                }
                Err(_) => s += " - | - | - | - |",
            }
        }
        s += "\n";
    }

    if let Some(t) = csv_as_table(&out.join(GAPS_FILE))? {
        s += "\n## Sample gaps\n\n";
        s += &t;
    }
    if let Some(t) = csv_as_table(&out.join(SESSIONS_FILE))? {
        let _ = write!(
            s,
            "\n## Trust sessions ({})\n\nGen columns: percent of updates below T. Imp columns: percent above T.\n\n",
            config.trust_setting
        );
        s += &t;
    }
    if let Ok(text) = std::fs::read_to_string(out.join(BENCH_FILE)) {
        let b: BenchReport =
            serde_json::from_str(&text).map_err(|e| CliError::Dataset(format!("{BENCH_FILE}: {e}")))?;
        s += "\n## Timing and template size\n\n";
        s += &render_bench(&b);
    }
    std::fs::write(out.join(REPORT_FILE), &s)?;
    Ok(s)
}
