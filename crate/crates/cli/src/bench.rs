//! Single-thread latency of the encoders and matchers, and template sizes.

use std::time::Instant;

use iris_hmd::iriscode::template;
use iris_hmd::normalize::load_pair;
use iris_hmd::{
    encode, hamming, shifted_hamming, EncoderKind, EncoderParams, IrisMask, MatchConfig, NormalizedIris,
};
use serde::{Deserialize, Serialize};

use crate::prepare::load_metadata;
use crate::{mask_path, normalized_path, write_json, CliError, CliResult, RunConfig};

pub const BENCH_FILE: &str = "bench.json";
/// Desk-scale budget per encoder call.
pub const ENCODER_BUDGET_MS: f64 = 10.0;
pub const HD_BUDGET_MS: f64 = 2.0;
pub const SHD_BUDGET_MS: f64 = 6.0;
/// Published per-template PNG sizes for LG, DCT and CSBCA.
pub const REFERENCE_PNG_BYTES: [(EncoderKind, usize); 3] = [
    (EncoderKind::LogGabor, 915),
    (EncoderKind::Dct, 1022),
    (EncoderKind::Csbca, 336),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub name: String,
    pub iterations: usize,
    pub median_ms: f64,
    pub budget_ms: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateSize {
    pub encoder: String,
    pub bits: usize,
    /// Code plus mask, bit-packed.
    pub packed_bytes: usize,
    /// IRC1 file including its header.
    pub file_bytes: usize,
    /// Code and mask planes as one 1-bit PNG.
    pub png_bytes: usize,
    pub reference_png_bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub timings: Vec<Timing>,
    pub templates: Vec<TemplateSize>,
}

fn median_ms(iterations: usize, mut f: impl FnMut()) -> f64 {
    f();
    let mut samples: Vec<f64> = (0..iterations)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

fn timing(name: String, iterations: usize, budget_ms: f64, f: impl FnMut()) -> Timing {
    let median_ms = median_ms(iterations, f);
    Timing {
        name,
        iterations,
        median_ms,
        budget_ms,
        pass: median_ms < budget_ms,
    }
}

/// Time every encoder on `a`, and HD / SHD between the LG codes of `a`
/// and `b`.
pub fn run_bench(
    a: (&NormalizedIris, &IrisMask),
    b: (&NormalizedIris, &IrisMask),
    params: &EncoderParams,
    matcher: &MatchConfig,
    iterations: usize,
) -> CliResult<BenchReport> {
    let mut timings = Vec::new();
    let mut templates = Vec::new();
    for kind in EncoderKind::ALL {
        let code = encode(kind, a.0, a.1, params)?;
        timings.push(timing(format!("encode {kind}"), iterations, ENCODER_BUDGET_MS, || {
            std::hint::black_box(encode(kind, a.0, a.1, params).unwrap());
        }));
        let reference = REFERENCE_PNG_BYTES.iter().find(|(k, _)| *k == kind).unwrap().1;
        templates.push(TemplateSize {
            encoder: kind.name().to_string(),
            bits: code.len(),
            packed_bytes: code.packed_bytes(),
            file_bytes: template::to_bytes(&code).len(),
            png_bytes: template::to_png(&code)?.len(),
            reference_png_bytes: reference,
        });
    }
    let ca = encode(EncoderKind::LogGabor, a.0, a.1, params)?;
    let cb = encode(EncoderKind::LogGabor, b.0, b.1, params)?;
    let bits = ca.len();
    timings.push(timing(format!("HD {bits} bits"), iterations, HD_BUDGET_MS, || {
        let _ = std::hint::black_box(hamming(&ca, &cb, matcher.min_overlap));
    }));
    timings.push(timing(
        format!("SHD {bits} bits, +-{}", matcher.max_shift),
        iterations,
        SHD_BUDGET_MS,
        || {
            let _ = std::hint::black_box(shifted_hamming(&ca, &cb, matcher));
        },
    ));
    Ok(BenchReport { timings, templates })
}

pub fn cmd_bench(config: &RunConfig) -> CliResult<BenchReport> {
    config.validate()?;
    let out = &config.output_dir;
    let mut ok: Vec<_> = load_metadata(out)?.into_iter().filter(|r| r.is_ok()).collect();
    // best-quality first; stable so equal IMRs keep table order
    ok.sort_by(|x, y| y.imr.total_cmp(&x.imr));
    let first = ok
        .first()
        .ok_or_else(|| CliError::Dataset("no successfully prepared capture to benchmark".into()))?;
    let second = ok
        .iter()
        .find(|r| r.identity_id != first.identity_id)
        .or_else(|| ok.get(1))
        .unwrap_or(first);
    let load = |r: &crate::prepare::CaptureRecord| {
        load_pair(
            &normalized_path(out, &r.identity_id, r.frame_index),
            &mask_path(out, &r.identity_id, r.frame_index),
        )
    };
    let (ta, ma) = load(first)?;
    let (tb, mb) = load(second)?;
    let report = run_bench(
        (&ta, &ma),
        (&tb, &mb),
        &config.encoder_params,
        &config.matcher,
        config.bench_iterations,
    )?;
    write_json(&out.join(BENCH_FILE), &report)?;
    Ok(report)
}

pub fn render_bench(report: &BenchReport) -> String {
    let mut s = String::from("| operation | median ms | budget ms | |\n|---|---:|---:|---|\n");
    for t in &report.timings {
        s += &format!(
            "| {} | {:.4} | {:.1} | {} |\n",
            t.name,
            t.median_ms,
            t.budget_ms,
            if t.pass { "pass" } else { "FAIL" }
        );
    }
    s += "\n| encoder | bits | packed B | IRC1 B | PNG B | reference PNG B |\n|---|---:|---:|---:|---:|---:|\n";
    for t in &report.templates {
        s += &format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            t.encoder, t.bits, t.packed_bytes, t.file_bytes, t.png_bytes, t.reference_png_bytes
        );
    }
    s
}
