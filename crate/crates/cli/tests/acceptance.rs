//! Acceptance suite. Prints one PASS / FAIL / SKIP line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Criterion 7 needs the OpenEDS semantic-segmentation validation split in
//! the dataset layout; point `IRIS_HMD_OPENEDS` at it to enable.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use iris_hmd::iriscode::BitVec;
use iris_hmd::metrics::{auc, eer, fmr10, roc};
use iris_hmd::protocol::filter_probe_imrs;
use iris_hmd::synth::{self, IrisTexture, SessionStyle, Wave};
use iris_hmd::{
    encode, fit_eye_geometry, hamming, refine_labels, shifted_hamming, unroll, update_trust, Class, EncoderKind,
    EncoderParams, Event, EyeCapture, Frame, IrisCode, LabelMap, MatchConfig, NormalizedSize, Scenario, ScoreSet,
    TrustConfig, TrustState,
};
use iris_hmd_cli::verify::{load_report, load_splits, metrics_path};
use iris_hmd_cli::{default_settings, Setting};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

// criterion 1 / 2
const MATCHER_PAIRS: usize = 10_000;
const MIN_BITS: usize = 1024;
const MAX_BITS: usize = 16_384;
const MATCHER_SUITE_BUDGET: Duration = Duration::from_secs(60);
const SHIFT_CODES: usize = 1000;
const MAX_SHIFT: usize = 8;
// criterion 3
const METRIC_SETS: usize = 200;
const METRIC_SET_SIZE: usize = 200;
const AUC_TOL: f64 = 1e-12;
// criterion 4
const SCRIPT_FRAMES: usize = 200;
const FUZZ_UPDATES: usize = 1_000_000;
// criterion 5
const DISK_TRIALS: usize = 200;
const GEOMETRY_TOL_PX: f64 = 1.0;
const ROTATION_TRIALS: usize = 20;
const ROTATION_TOL_LEVELS: f32 = 1.0;
// criterion 6
const GAP_SEQUENCES: usize = 1000;
// criterion 7
const OPENEDS_ENV: &str = "IRIS_HMD_OPENEDS";
const REFERENCE_BEST_EER: f64 = 0.3166;
const BEST_EER_TOL: f64 = 0.05;
const REFERENCE_IMR_FLOOR: f64 = 0.7;
// criterion 8
const ENCODER_BUDGET_MS: f64 = 10.0;
const HD_BUDGET_MS: f64 = 2.0;
const SHD_BUDGET_MS: f64 = 6.0;
const TIMING_ITERS: usize = 200;
const FULL_IDENTITIES: usize = 28;
const FULL_FRAMES: usize = 86;
const FULL_RUN_BUDGET: Duration = Duration::from_secs(600);

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// ---------------------------------------------------------------- matcher

struct RawCode {
    code: Vec<bool>,
    mask: Vec<bool>,
    extent: usize,
}

impl RawCode {
    fn random(rng: &mut ChaCha8Rng, bits: usize, extent: usize, mask_density: f64) -> Self {
        Self {
            code: (0..bits).map(|_| rng.gen()).collect(),
            mask: (0..bits).map(|_| rng.gen_bool(mask_density)).collect(),
            extent,
        }
    }

    fn packed(&self) -> IrisCode {
        IrisCode::new(
            EncoderKind::LogGabor,
            BitVec::from_bools(&self.code),
            BitVec::from_bools(&self.mask),
            self.extent,
        )
        .unwrap()
    }
}

/// Bit `j` of each row of `b` shifted by `s` reads input bit `j - s`.
fn naive_counts(a: &RawCode, b: &RawCode, s: isize) -> (usize, usize) {
    let e = a.extent as isize;
    let (mut mism, mut overlap) = (0, 0);
    for i in 0..a.code.len() {
        let row = i as isize / e;
        let col = i as isize % e;
        let k = (row * e + (col - s).rem_euclid(e)) as usize;
        if a.mask[i] && b.mask[k] {
            overlap += 1;
            if a.code[i] != b.code[k] {
                mism += 1;
            }
        }
    }
    (mism, overlap)
}

/// (distance, mismatches, overlap, shift) or None on zero overlap at every shift.
fn naive_shd(a: &RawCode, b: &RawCode, max_shift: usize) -> Option<(f64, usize, usize, i32)> {
    let mut best: Option<(f64, usize, usize, i32)> = None;
    let mut order = vec![0isize];
    for k in 1..=max_shift as isize {
        order.push(-k);
        order.push(k);
    }
    for s in order {
        let (m, o) = naive_counts(a, b, s);
        if o == 0 {
            continue;
        }
        let d = m as f64 / o as f64;
        if best.is_none_or(|(bd, ..)| d < bd) {
            best = Some((d, m, o, s as i32));
        }
    }
    best
}

fn random_shape(rng: &mut ChaCha8Rng) -> (usize, usize) {
    const EXTENTS: [usize; 8] = [64, 100, 128, 256, 257, 512, 1000, 1024];
    let extent = EXTENTS[rng.gen_range(0..EXTENTS.len())];
    let rows = rng.gen_range(MIN_BITS.div_ceil(extent)..=MAX_BITS / extent);
    (rows * extent, extent)
}

fn criterion_1_and_2() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cfg = MatchConfig {
        max_shift: MAX_SHIFT,
        min_overlap: 1,
    };
    let start = Instant::now();
    let mut mismatched = Vec::new();
    let mut shd_above_hd = 0usize;
    let mut no_overlap = 0usize;
    for pair in 0..MATCHER_PAIRS {
        let (bits, extent) = random_shape(&mut rng);
        // a few very sparse masks exercise the zero-overlap path
        let density = if pair % 50 == 0 { 0.0005 } else { rng.gen_range(0.2..1.0) };
        let a = RawCode::random(&mut rng, bits, extent, density);
        let b = RawCode::random(&mut rng, bits, extent, density);
        let (pa, pb) = (a.packed(), b.packed());

        let (m0, o0) = naive_counts(&a, &b, 0);
        let hd = hamming(&pa, &pb, 1);
        let hd_ok = match &hd {
            Ok(s) => o0 > 0 && s.mismatches == m0 && s.overlap_bits == o0 && s.distance == m0 as f64 / o0 as f64,
            Err(_) => o0 == 0,
        };
        let shd = shifted_hamming(&pa, &pb, &cfg);
        let want = naive_shd(&a, &b, MAX_SHIFT);
        let shd_ok = match (&shd, want) {
            (Ok(s), Some((d, m, o, k))) => {
                s.distance == d && s.mismatches == m && s.overlap_bits == o && s.shift_used == k
            }
            (Err(_), None) => true,
            _ => false,
        };
        if o0 == 0 {
            no_overlap += 1;
        }
        if !(hd_ok && shd_ok) {
            mismatched.push(pair);
        }
        if let (Ok(h), Ok(s)) = (&hd, &shd) {
            if s.distance > h.distance {
                shd_above_hd += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let c1 = check(
        mismatched.is_empty() && elapsed < MATCHER_SUITE_BUDGET,
        format!(
            "{MATCHER_PAIRS} pairs, {} disagreements with the per-bit oracle, {no_overlap} zero-overlap pairs, {:.1} s (budget {} s)",
            mismatched.len(),
            elapsed.as_secs_f64(),
            MATCHER_SUITE_BUDGET.as_secs()
        ),
    );

    let mut not_zero = 0usize;
    for _ in 0..SHIFT_CODES {
        let (bits, extent) = random_shape(&mut rng);
        let density = rng.gen_range(0.2..1.0);
        let a = RawCode::random(&mut rng, bits, extent, density).packed();
        for k in -(MAX_SHIFT as isize)..=MAX_SHIFT as isize {
            match shifted_hamming(&a, &a.rotate(k), &cfg) {
                Ok(s) if s.distance == 0.0 && s.shift_used == -k as i32 => {}
                _ => not_zero += 1,
            }
        }
    }
    let c2 = check(
        not_zero == 0 && shd_above_hd == 0,
        format!(
            "{SHIFT_CODES} codes x {} shifts: {not_zero} non-zero SHD; SHD > HD on {shd_above_hd} of the criterion-1 pairs",
            2 * MAX_SHIFT + 1
        ),
    );
    (c1, c2)
}

// ---------------------------------------------------------------- metrics

struct SweepOracle {
    eer: f64,
    eer_threshold: f64,
    fmr10: f64,
}

fn sweep_oracle(gen: &[f64], imp: &[f64]) -> SweepOracle {
    let mut grid: Vec<f64> = gen.iter().chain(imp).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut thresholds = vec![grid[0] - 1.0];
    thresholds.extend(&grid);
    thresholds.push(grid[grid.len() - 1] + 1.0);
    let (ng, ni) = (gen.len(), imp.len());
    let mut best: Option<(u128, f64, f64)> = None;
    let mut fmr10 = f64::INFINITY;
    for &t in &thresholds {
        let accepted = imp.iter().filter(|&&s| s >= t).count();
        let rejected = gen.iter().filter(|&&s| s < t).count();
        let fmr = accepted as f64 / ni as f64;
        let fnmr = rejected as f64 / ng as f64;
        let gap = (accepted as u128 * ng as u128).abs_diff(rejected as u128 * ni as u128);
        if best.is_none_or(|(g, ..)| gap < g) {
            best = Some((gap, (fmr + fnmr) / 2.0, t));
        }
        if 10 * accepted <= ni {
            fmr10 = fmr10.min(fnmr);
        }
    }
    let (_, eer, eer_threshold) = best.unwrap();
    SweepOracle {
        eer,
        eer_threshold,
        fmr10,
    }
}

fn mann_whitney(gen: &[f64], imp: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &g in gen {
        for &i in imp {
            if g > i {
                wins += 1.0;
            } else if g == i {
                wins += 0.5;
            }
        }
    }
    wins / (gen.len() * imp.len()) as f64
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let mut bad = 0usize;
    let mut worst_auc = 0.0f64;
    for set in 0..METRIC_SETS {
        let ng = rng.gen_range(20..METRIC_SET_SIZE - 20);
        // coarse quantization on half the sets forces ties
        let levels = if set % 2 == 0 { 40.0 } else { 1e9 };
        let q = |x: f64| (x * levels).round() / levels;
        let sep = rng.gen_range(0.0..0.4);
        let gen: Vec<f64> = (0..ng).map(|_| q(rng.gen_range(0.3 + sep..1.0f64).min(1.0))).collect();
        let imp: Vec<f64> = (0..METRIC_SET_SIZE - ng).map(|_| q(rng.gen_range(0.0..0.7))).collect();
        let s = ScoreSet::new(gen.clone(), imp.clone());
        let o = sweep_oracle(&gen, &imp);
        let (e, t) = eer(&s).unwrap();
        let f = fmr10(&s).unwrap();
        let a = auc(&s).unwrap();
        let mw = mann_whitney(&gen, &imp);
        worst_auc = worst_auc.max((a - mw).abs());
        let grid_ok = roc(&s).unwrap().len() >= 2;
        if !(e == o.eer && t == o.eer_threshold && f == o.fmr10 && (a - mw).abs() <= AUC_TOL && grid_ok) {
            bad += 1;
        }
    }
    check(
        bad == 0,
        format!("{METRIC_SETS} sets of {METRIC_SET_SIZE}: {bad} disagreements; max |AUC - Mann-Whitney| = {worst_auc:.1e} (tol {AUC_TOL:.0e})"),
    )
}

// ---------------------------------------------------------------- trust

/// Straight-line restatement of the trust update, independent of the library.
fn simulate(frames: &[Frame], t: f64, alpha: f64, imr_th: f64, lockout: Option<f64>) -> Vec<f64> {
    let mut tv = t;
    let mut out = Vec::new();
    for f in frames {
        if f.imr < imr_th {
            tv -= alpha;
            if tv < -1.0 {
                tv = -1.0;
            }
        } else {
            let cs = f.cs.unwrap();
            if cs >= t {
                tv += cs - t;
                if tv > 1.0 {
                    tv = 1.0;
                }
            } else {
                tv -= t - cs;
                if tv < -1.0 {
                    tv = -1.0;
                }
            }
        }
        out.push(tv);
        if let Some(l) = lockout {
            if tv < l {
                break;
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut scripts_ok = true;
    let mut scripts = 0;
    for lockout in [None, Some(-0.5)] {
        for _ in 0..25 {
            let cfg = TrustConfig {
                threshold: rng.gen_range(0.3..0.7),
                alpha: rng.gen_range(0.001..0.2),
                imr_threshold: 0.7,
                lockout_enabled: lockout.is_some(),
                lockout_threshold: lockout,
            };
            let frames: Vec<Frame> = (0..SCRIPT_FRAMES)
                .map(|_| Frame {
                    imr: rng.gen(),
                    cs: Some(rng.gen()),
                })
                .collect();
            let got = iris_hmd::run_session("s", Scenario::Genuine, &frames, &cfg).unwrap();
            let want = simulate(&frames, cfg.threshold, cfg.alpha, cfg.imr_threshold, lockout);
            scripts += 1;
            if got.trajectory != want {
                scripts_ok = false;
            }
        }
    }

    let cfg = TrustConfig {
        threshold: 0.5,
        alpha: 0.3,
        ..TrustConfig::default()
    };
    let mut state = TrustState {
        tv: 0.5,
        locked_out: false,
        update_count: 0,
    };
    let mut escapes = 0usize;
    for _ in 0..FUZZ_UPDATES {
        let e = if rng.gen_bool(0.2) {
            Event::LowQuality
        } else {
            Event::Score(rng.gen())
        };
        state = update_trust(state, e, &cfg).unwrap();
        if !(-1.0..=1.0).contains(&state.tv) {
            escapes += 1;
        }
    }
    check(
        scripts_ok && escapes == 0 && state.update_count == FUZZ_UPDATES,
        format!(
            "{scripts} scripted {SCRIPT_FRAMES}-frame sessions {}; {escapes} of {FUZZ_UPDATES} fuzz updates left [-1, 1]",
            if scripts_ok { "element-exact" } else { "DIVERGED" }
        ),
    )
}

// ---------------------------------------------------------------- geometry

fn disk_labels(w: u32, h: u32, c: (f64, f64), rp: f64, ri: f64) -> LabelMap {
    LabelMap::from_fn(w, h, |x, y| {
        let d = (x as f64 - c.0).hypot(y as f64 - c.1);
        if d <= rp {
            Class::Pupil
        } else if d <= ri {
            Class::Iris
        } else {
            Class::Background
        }
    })
}

/// At most 6 angular and half a radial cycle per wave.
fn band_limited(rng: &mut ChaCha8Rng) -> IrisTexture {
    IrisTexture {
        base: 110.0,
        waves: (0..6)
            .map(|_| Wave {
                angular_cycles: rng.gen_range(1..=6),
                radial_cycles: rng.gen_range(0.0..0.5),
                amplitude: rng.gen_range(4.0..14.0),
                phase: rng.gen_range(0.0..2.0 * std::f64::consts::PI),
            })
            .collect(),
    }
}

/// The texture fills the whole frame, so no intensity step breaks the band
/// limit at the pupil or limbus; labels are the concentric disks.
fn smooth_capture(tex: &IrisTexture, c: (f64, f64), rp: f64, ri: f64, rotation: f64) -> EyeCapture {
    let (w, h) = (320, 240);
    let img = image::GrayImage::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - c.0, y as f64 - c.1);
        let t = (dx.hypot(dy) - rp) / (ri - rp);
        let v = tex.value((-dy).atan2(dx) - rotation, t);
        image::Luma([v.round().clamp(0.0, 255.0) as u8])
    });
    EyeCapture::new("r", 0, img, disk_labels(w, h, c, rp, ri)).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut worst = 0.0f64;
    let mut worst_analytic = 0.0f64;
    for _ in 0..DISK_TRIALS {
        let c = (rng.gen_range(80.0..120.0), rng.gen_range(80.0..120.0));
        let rp = rng.gen_range(6.0..30.0);
        let ri = rng.gen_range(rp + 10.0..75.0);
        let labels = refine_labels(&disk_labels(200, 200, c, rp, ri));
        let g = fit_eye_geometry(&labels).unwrap();
        // brute force about the analytic center: nearest pupil pixel with a
        // non-pupil 4-neighbour, furthest iris pixel
        let pupil_at = |x: i64, y: i64| {
            (0..200).contains(&x) && (0..200).contains(&y) && labels.get(x as u32, y as u32) == Class::Pupil
        };
        let (mut pupil_min, mut iris_max) = (f64::INFINITY, 0.0f64);
        for y in 0..200i64 {
            for x in 0..200i64 {
                let d = (x as f64 - c.0).hypot(y as f64 - c.1);
                if pupil_at(x, y) {
                    let edge = [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|&(dx, dy)| !pupil_at(x + dx, y + dy));
                    if edge {
                        pupil_min = pupil_min.min(d);
                    }
                } else if labels.get(x as u32, y as u32) == Class::Iris {
                    iris_max = iris_max.max(d);
                }
            }
        }
        let err = [
            (g.pupil_center.0 - c.0).abs(),
            (g.pupil_center.1 - c.1).abs(),
            (g.pupil_radius - pupil_min).abs(),
            (g.iris_radius - iris_max).abs(),
        ];
        worst = err.iter().copied().fold(worst, f64::max);
        // the boundary-pixel radius sits up to a pixel inside the analytic circle
        worst_analytic = worst_analytic.max((g.pupil_radius - rp).abs()).max((g.iris_radius - ri).abs());
    }

    let size = NormalizedSize::default();
    let mut worst_level = 0.0f32;
    let mut compared = 0usize;
    for _ in 0..ROTATION_TRIALS {
        let tex = band_limited(&mut rng);
        let k = rng.gen_range(-8isize..=8);
        let center = (160.0 + rng.gen_range(-3.0..3.0), 120.0 + rng.gen_range(-3.0..3.0));
        let (rp, ri) = (rng.gen_range(18.0..30.0), 62.0);
        let turn = 2.0 * std::f64::consts::PI * k as f64 / size.angular as f64;
        let (c0, c1) = (smooth_capture(&tex, center, rp, ri, 0.0), smooth_capture(&tex, center, rp, ri, turn));
        let geometry = fit_eye_geometry(&c0.labels).unwrap();
        let (u0, m0) = unroll(&c0, &geometry, size).unwrap();
        let (u1, m1) = unroll(&c1, &geometry, size).unwrap();
        let (u0, m0) = (u0.rotate(k), m0.rotate(k));
        for r in 0..size.radial {
            for a in 0..size.angular {
                if m0.get(a, r) && m1.get(a, r) {
                    compared += 1;
                    worst_level = worst_level.max((u0.get(a, r) - u1.get(a, r)).abs());
                }
            }
        }
    }
    check(
        worst <= GEOMETRY_TOL_PX && worst_level <= ROTATION_TOL_LEVELS && compared > 0,
        format!(
            "{DISK_TRIALS} disk pairs: worst center/radius error vs pixel oracle {worst:.3} px (tol {GEOMETRY_TOL_PX}), \
             vs analytic circles {worst_analytic:.3} px; \
             {ROTATION_TRIALS} rotations: worst unroll difference {worst_level:.3} levels over {compared} samples (tol {ROTATION_TOL_LEVELS})"
        ),
    )
}

// ---------------------------------------------------------------- gaps

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let thresholds: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let mut zero_ok = true;
    let mut monotone_ok = true;
    let mut sums_ok = true;
    for _ in 0..GAP_SEQUENCES {
        let n = rng.gen_range(0..120);
        let imrs: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.05) { 0.0 } else { rng.gen() })
            .collect();
        let (kept, h) = filter_probe_imrs(&imrs, 0.0);
        if kept.len() != n || h.max_sg != 0 || h.bins[0] != n.saturating_sub(1) as u64 || h.bins[1..].iter().any(|&b| b != 0)
        {
            zero_ok = false;
        }
        let mut last = 0;
        for &t in &thresholds {
            let (kept, h) = filter_probe_imrs(&imrs, t);
            if h.max_sg < last {
                monotone_ok = false;
            }
            last = h.max_sg;
            if h.occurrences() != kept.len().saturating_sub(1) as u64 {
                sums_ok = false;
            }
        }
    }
    check(
        zero_ok && monotone_ok && sums_ok,
        format!(
            "{GAP_SEQUENCES} sequences: threshold 0 all in SG 0-1 with Max SG 0: {zero_ok}; Max SG monotone over {} thresholds: {monotone_ok}; occurrences = kept - 1: {sums_ok}",
            thresholds.len()
        ),
    )
}

// ---------------------------------------------------------------- dataset

fn run_pipeline(bin: &str, dataset: &Path, out: &Path) -> Result<(), String> {
    for stage in ["prepare", "verify"] {
        let o = Command::new(bin)
            .args([stage, "--dataset"])
            .arg(dataset)
            .arg("--out")
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("{stage}: {}", String::from_utf8_lossy(&o.stderr).trim()));
        }
    }
    Ok(())
}

fn criterion_7(bin: &str) -> Outcome {
    let Some(root) = std::env::var_os(OPENEDS_ENV) else {
        return Outcome::Skip(format!("{OPENEDS_ENV} not set; criteria 1-6 and 8 stand"));
    };
    let dir = tempfile::TempDir::new().unwrap();
    let out = dir.path().join("out");
    if let Err(e) = run_pipeline(bin, Path::new(&root), &out) {
        return Outcome::Fail(e);
    }
    let eer_of = |s: &Setting, th: f64| load_report(&metrics_path(&out, s, th)).map(|r| r.metrics.eer);
    let mut notes = Vec::new();
    let mut ok = true;
    let mut best = f64::INFINITY;
    for s in default_settings() {
        let (Ok(e0), Ok(e7)) = (eer_of(&s, 0.0), eer_of(&s, 0.7)) else {
            return Outcome::Fail(format!("metrics missing for {s}"));
        };
        best = best.min(e7).min(e0);
        if e7 >= e0 {
            ok = false;
            notes.push(format!("{s}: EER@0.7 {e7:.4} >= EER@0.0 {e0:.4}"));
        }
        if s.distance == iris_hmd::DistanceKind::Shd {
            let hd = Setting::new(s.encoder, iris_hmd::DistanceKind::Hd);
            for th in [0.0, 0.7] {
                let (a, b) = (eer_of(&s, th).unwrap(), eer_of(&hd, th).unwrap());
                if a > b {
                    ok = false;
                    notes.push(format!("{s} {a:.4} > {hd} {b:.4} at IMR {th}"));
                }
            }
        }
    }
    if (best - REFERENCE_BEST_EER).abs() > BEST_EER_TOL {
        ok = false;
        notes.push(format!("best EER {best:.4} outside {REFERENCE_BEST_EER} +- {BEST_EER_TOL}"));
    }
    let splits = match load_splits(&out) {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let min_ref = splits
        .identities
        .iter()
        .map(|i| i.selected_reference_imr)
        .fold(f64::INFINITY, f64::min);
    if min_ref <= REFERENCE_IMR_FLOOR {
        ok = false;
        notes.push(format!("lowest reference IMR {min_ref:.4}"));
    }
    check(
        ok,
        format!("best EER {best:.4}, lowest reference IMR {min_ref:.4}. {}", notes.join("; ")),
    )
}

// ---------------------------------------------------------------- performance

fn median_ms(iters: usize, mut f: impl FnMut()) -> f64 {
    f();
    let mut v: Vec<f64> = (0..iters)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn criterion_8(bin: &str) -> Outcome {
    let style = SessionStyle::default();
    let size = NormalizedSize::default();
    let params = EncoderParams::default();
    let prep = |id: usize| {
        let c = synth::capture(SEED, id, 3, &SessionStyle {
            blink_rate: 0.0,
            occlusion_rate: 0.0,
            ..style.clone()
        });
        let labels = refine_labels(&c.labels);
        let g = fit_eye_geometry(&labels).unwrap();
        let c = EyeCapture::new(c.identity_id, c.frame_index, c.image, labels).unwrap();
        unroll(&c, &g, size).unwrap()
    };
    let (ta, ma) = prep(0);
    let (tb, mb) = prep(1);
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in EncoderKind::ALL {
        let ms = median_ms(TIMING_ITERS, || {
            std::hint::black_box(encode(kind, &ta, &ma, &params).unwrap());
        });
        ok &= ms < ENCODER_BUDGET_MS;
        parts.push(format!("{kind} {ms:.2} ms"));
    }
    let a = encode(EncoderKind::LogGabor, &ta, &ma, &params).unwrap();
    let b = encode(EncoderKind::LogGabor, &tb, &mb, &params).unwrap();
    let cfg = MatchConfig::default();
    let hd = median_ms(TIMING_ITERS, || {
        let _ = std::hint::black_box(hamming(&a, &b, 1));
    });
    let shd = median_ms(TIMING_ITERS, || {
        let _ = std::hint::black_box(shifted_hamming(&a, &b, &cfg));
    });
    ok &= a.len() == MAX_BITS && hd < HD_BUDGET_MS && shd < SHD_BUDGET_MS;
    parts.push(format!("HD {hd:.3} ms, SHD {shd:.3} ms on {} bits", a.len()));

    let dir = tempfile::TempDir::new().unwrap();
    let data = dir.path().join("data");
    synth::write_dataset(&data, FULL_IDENTITIES, FULL_FRAMES, SEED, &style).unwrap();
    let start = Instant::now();
    let run = run_pipeline(bin, &data, &dir.path().join("out"));
    let elapsed = start.elapsed();
    let probes = load_splits(&dir.path().join("out"))
        .map(|s| s.identities.iter().map(|i| i.probe_frames.len()).sum::<usize>())
        .unwrap_or(0);
    ok &= run.is_ok() && elapsed < FULL_RUN_BUDGET;
    parts.push(format!(
        "{FULL_IDENTITIES}x{FULL_FRAMES} prepare+verify ({probes} probes) {:.0} s (budget {} s){}",
        elapsed.as_secs_f64(),
        FULL_RUN_BUDGET.as_secs(),
        run.err().map(|e| format!(": {e}")).unwrap_or_default()
    ));
    check(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let bin = env!("CARGO_BIN_EXE_iris-hmd");
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let (c1, c2) = criterion_1_and_2();
    results.push(("1 matcher oracle equivalence", c1));
    results.push(("2 shift invariance", c2));
    results.push(("3 metrics oracle", criterion_3()));
    results.push(("4 trust reference equivalence", criterion_4()));
    results.push(("5 geometry and normalization", criterion_5()));
    results.push(("6 gap analysis structure", criterion_6()));
    results.push(("7 dataset reproduction", criterion_7(bin)));
    results.push(("8 performance budget", criterion_8(bin)));

    let mut failed = 0;
    for (name, outcome) in &results {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} criterion {name}: {detail}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
