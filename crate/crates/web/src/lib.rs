//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Three operations, all on seeded synthetic captures:
//! `inspect_capture` unrolls one frame, `compare_captures` scores two frames,
//! `trust_session` runs a continuous-trust session for one identity.
//!
//! The `*_native` functions hold the logic and are what the tests call.

use iris_hmd::protocol::DEFAULT_N_REF;
use iris_hmd::synth::{self, SessionStyle};
use iris_hmd::{
    compare, compute_imr, encode, fit_eye_geometry, refine_labels, run_session, unroll, DistanceKind, EncoderKind,
    EncoderParams, EyeCapture, EyeGeometry, Frame, IrisCode, IrisMask, MatchConfig, NormalizedIris, NormalizedSize,
    Scenario, TrustConfig,
};
use wasm_bindgen::prelude::*;

/// Frames skipped between the reference pool and the first probe.
const N_SKIP: usize = 5;

struct Prepared {
    capture: EyeCapture,
    geometry: Option<EyeGeometry>,
    unrolled: Option<(NormalizedIris, IrisMask)>,
    imr: f64,
    error: Option<String>,
}

fn prepare(seed: u64, identity: usize, frame: usize) -> Prepared {
    let capture = synth::capture(seed, identity, frame, &SessionStyle::default());
    let labels = refine_labels(&capture.labels);
    let refined = EyeCapture::new(capture.identity_id.clone(), capture.frame_index, capture.image.clone(), labels)
        .expect("same dimensions");
    let fitted = fit_eye_geometry(&refined.labels)
        .and_then(|g| unroll(&refined, &g, NormalizedSize::default()).map(|u| (g, u)));
    match fitted {
        Ok((g, (texture, mask))) => Prepared {
            imr: compute_imr(&mask).imr,
            capture,
            geometry: Some(g),
            unrolled: Some((texture, mask)),
            error: None,
        },
        Err(e) => Prepared {
            capture,
            geometry: None,
            unrolled: None,
            imr: 0.0,
            error: Some(e.to_string()),
        },
    }
}

fn gray_to_rgba(values: impl Iterator<Item = u8>) -> Vec<u8> {
    values.flat_map(|v| [v, v, v, 255]).collect()
}

fn parse_setting(encoder: &str, distance: &str) -> Result<(EncoderKind, DistanceKind), String> {
    let e: EncoderKind = encoder.parse().map_err(|_| format!("unknown encoder {encoder}"))?;
    let d: DistanceKind = distance.parse().map_err(|_| format!("unknown distance {distance}"))?;
    Ok((e, d))
}

fn template(p: &Prepared, kind: EncoderKind) -> Result<IrisCode, String> {
    let (t, m) = p.unrolled.as_ref().ok_or_else(|| p.error.clone().unwrap_or_default())?;
    encode(kind, t, m, &EncoderParams::default()).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub struct CaptureView {
    width: u32,
    height: u32,
    eye_rgba: Vec<u8>,
    normalized_width: u32,
    normalized_height: u32,
    normalized_rgba: Vec<u8>,
    code_width: u32,
    code_height: u32,
    code_rgba: Vec<u8>,
    imr: f64,
    pupil: Vec<f64>,
    error: Option<String>,
}

#[wasm_bindgen]
impl CaptureView {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> u32 {
        self.width
    }
    #[wasm_bindgen(getter)]
    pub fn height(&self) -> u32 {
        self.height
    }
    #[wasm_bindgen(getter)]
    pub fn eye_rgba(&self) -> Vec<u8> {
        self.eye_rgba.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn normalized_width(&self) -> u32 {
        self.normalized_width
    }
    #[wasm_bindgen(getter)]
    pub fn normalized_height(&self) -> u32 {
        self.normalized_height
    }
    /// Unrolled texture; samples outside the mask are tinted red.
    #[wasm_bindgen(getter)]
    pub fn normalized_rgba(&self) -> Vec<u8> {
        self.normalized_rgba.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn code_width(&self) -> u32 {
        self.code_width
    }
    #[wasm_bindgen(getter)]
    pub fn code_height(&self) -> u32 {
        self.code_height
    }
    /// LG iriscode: black/white bits, masked bits grey.
    #[wasm_bindgen(getter)]
    pub fn code_rgba(&self) -> Vec<u8> {
        self.code_rgba.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn imr(&self) -> f64 {
        self.imr
    }
    /// `[x, y, pupil_radius, iris_radius]`, empty when fitting failed.
    #[wasm_bindgen(getter)]
    pub fn circles(&self) -> Vec<f64> {
        self.pupil.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn error(&self) -> Option<String> {
        self.error.clone()
    }
}

pub fn inspect_capture_native(seed: u64, identity: usize, frame: usize) -> CaptureView {
    let p = prepare(seed, identity, frame);
    let (width, height) = (p.capture.width(), p.capture.height());
    let eye_rgba = gray_to_rgba(p.capture.image.as_raw().iter().copied());
    let (mut nw, mut nh, mut normalized_rgba) = (0, 0, Vec::new());
    let (mut cw, mut chh, mut code_rgba) = (0, 0, Vec::new());
    if let Some((t, m)) = &p.unrolled {
        nw = t.angular() as u32;
        nh = t.radial() as u32;
        for r in 0..t.radial() {
            for a in 0..t.angular() {
                let v = t.get(a, r).round().clamp(0.0, 255.0) as u8;
                if m.get(a, r) {
                    normalized_rgba.extend([v, v, v, 255]);
                } else {
                    normalized_rgba.extend([v / 2 + 128, v / 3, v / 3, 255]);
                }
            }
        }
        if let Ok(code) = template(&p, EncoderKind::LogGabor) {
            cw = code.angular_extent as u32;
            chh = code.rows() as u32;
            for i in 0..code.len() {
                let px = match (code.mask.get(i), code.code.get(i)) {
                    (false, _) => [128, 128, 128, 255],
                    (true, true) => [255, 255, 255, 255],
                    (true, false) => [0, 0, 0, 255],
                };
                code_rgba.extend(px);
            }
        }
    }
    CaptureView {
        width,
        height,
        eye_rgba,
        normalized_width: nw,
        normalized_height: nh,
        normalized_rgba,
        code_width: cw,
        code_height: chh,
        code_rgba,
        imr: p.imr,
        pupil: p
            .geometry
            .map(|g| vec![g.pupil_center.0, g.pupil_center.1, g.pupil_radius, g.iris_radius])
            .unwrap_or_default(),
        error: p.error,
    }
}

#[wasm_bindgen]
pub fn inspect_capture(seed: u32, identity: u32, frame: u32) -> CaptureView {
    inspect_capture_native(seed as u64, identity as usize, frame as usize)
}

#[wasm_bindgen]
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub distance: f64,
    pub similarity: f64,
    pub shift_used: i32,
    pub overlap_bits: u32,
    pub imr_a: f64,
    pub imr_b: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn compare_captures_native(
    seed: u64,
    id_a: usize,
    frame_a: usize,
    id_b: usize,
    frame_b: usize,
    encoder: &str,
    distance: &str,
) -> Result<Comparison, String> {
    let (kind, dist) = parse_setting(encoder, distance)?;
    let (a, b) = (prepare(seed, id_a, frame_a), prepare(seed, id_b, frame_b));
    let (ca, cb) = (template(&a, kind)?, template(&b, kind)?);
    let s = compare(&ca, &cb, dist, &MatchConfig::default()).map_err(|e| e.to_string())?;
    Ok(Comparison {
        distance: s.distance,
        similarity: s.similarity,
        shift_used: s.shift_used,
        overlap_bits: s.overlap_bits as u32,
        imr_a: a.imr,
        imr_b: b.imr,
    })
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn compare_captures(
    seed: u32,
    id_a: u32,
    frame_a: u32,
    id_b: u32,
    frame_b: u32,
    encoder: &str,
    distance: &str,
) -> Result<Comparison, JsError> {
    compare_captures_native(
        seed as u64,
        id_a as usize,
        frame_a as usize,
        id_b as usize,
        frame_b as usize,
        encoder,
        distance,
    )
    .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct TrustRun {
    trajectory: Vec<f64>,
    imrs: Vec<f64>,
    scores: Vec<f64>,
    pub reference_frame: u32,
    pub pct_below_threshold: f64,
    pub pct_above_threshold: f64,
    /// Frame count at lockout, 0 when the session never locked.
    pub time_to_lockout: u32,
}

#[wasm_bindgen]
impl TrustRun {
    #[wasm_bindgen(getter)]
    pub fn trajectory(&self) -> Vec<f64> {
        self.trajectory.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn imrs(&self) -> Vec<f64> {
        self.imrs.clone()
    }
    /// Similarity per probe; NaN where the probe failed geometry.
    #[wasm_bindgen(getter)]
    pub fn scores(&self) -> Vec<f64> {
        self.scores.clone()
    }
}

#[derive(Clone, Debug)]
pub struct TrustRequest {
    pub seed: u64,
    pub owner: usize,
    pub presenter: usize,
    pub probes: usize,
    pub threshold: f64,
    pub alpha: f64,
    pub imr_threshold: f64,
    pub lockout: bool,
}

/// Enrol `owner` from the best of its first frames, then present `probes`
/// frames of `presenter` and track trust with LG-SHD scores.
pub fn trust_session_native(req: &TrustRequest) -> Result<TrustRun, String> {
    let cfg = TrustConfig {
        threshold: req.threshold,
        alpha: req.alpha,
        imr_threshold: req.imr_threshold,
        lockout_enabled: req.lockout,
        lockout_threshold: None,
    };
    cfg.validate().map_err(|e| e.to_string())?;
    let pool: Vec<Prepared> = (0..DEFAULT_N_REF).map(|f| prepare(req.seed, req.owner, f)).collect();
    let best = (0..pool.len())
        .fold(0, |b, i| if pool[i].imr > pool[b].imr { i } else { b });
    let reference = template(&pool[best], EncoderKind::LogGabor)?;
    let match_cfg = MatchConfig::default();
    let first = DEFAULT_N_REF + N_SKIP;
    let mut frames = Vec::with_capacity(req.probes);
    let (mut imrs, mut scores) = (Vec::new(), Vec::new());
    for f in first..first + req.probes {
        let p = prepare(req.seed, req.presenter, f);
        let cs = template(&p, EncoderKind::LogGabor)
            .ok()
            .and_then(|c| compare(&c, &reference, DistanceKind::Shd, &match_cfg).ok())
            .map(|s| s.similarity);
        // a probe with no usable overlap cannot pass the gate
        let imr = if cs.is_some() { p.imr } else { 0.0 };
        imrs.push(imr);
        scores.push(cs.unwrap_or(f64::NAN));
        frames.push(Frame { imr, cs });
    }
    let scenario = if req.owner == req.presenter {
        Scenario::Genuine
    } else {
        Scenario::Impostor
    };
    let r = run_session(&synth::identity_name(req.owner), scenario, &frames, &cfg).map_err(|e| e.to_string())?;
    Ok(TrustRun {
        trajectory: r.trajectory,
        imrs,
        scores,
        reference_frame: best as u32,
        pct_below_threshold: r.pct_below_threshold,
        pct_above_threshold: r.pct_above_threshold,
        time_to_lockout: r.time_to_lockout.unwrap_or(0) as u32,
    })
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn trust_session(
    seed: u32,
    owner: u32,
    presenter: u32,
    probes: u32,
    threshold: f64,
    alpha: f64,
    imr_threshold: f64,
    lockout: bool,
) -> Result<TrustRun, JsError> {
    trust_session_native(&TrustRequest {
        seed: seed as u64,
        owner: owner as usize,
        presenter: presenter as usize,
        probes: probes as usize,
        threshold,
        alpha,
        imr_threshold,
        lockout,
    })
    .map_err(|e| JsError::new(&e))
}
