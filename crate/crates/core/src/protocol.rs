//! Reference/probe split, IMR gating and sample-gap analysis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_N_REF: usize = 10;
pub const DEFAULT_N_SKIP: usize = 5;
/// Frame period of the eye cameras (200 Hz).
pub const FRAME_PERIOD_MS: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SessionCapture<C> {
    pub frame_index: u64,
    pub capture: C,
    pub imr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentitySession<C> {
    pub identity_id: String,
    /// Sorted by strictly increasing `frame_index`.
    pub captures: Vec<SessionCapture<C>>,
}

impl<C> IdentitySession<C> {
    /// Builds a session, sorting captures by frame index.
    pub fn new(identity_id: impl Into<String>, mut captures: Vec<SessionCapture<C>>) -> Result<Self> {
        captures.sort_by_key(|c| c.frame_index);
        if captures.windows(2).any(|w| w[0].frame_index == w[1].frame_index) {
            return Err(Error::BadDataset("duplicate frame index in session".into()));
        }
        Ok(Self {
            identity_id: identity_id.into(),
            captures,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSplit<C> {
    pub identity_id: String,
    pub reference_pool: Vec<SessionCapture<C>>,
    pub skipped: Vec<SessionCapture<C>>,
    pub probes: Vec<SessionCapture<C>>,
    /// Index into `reference_pool`.
    pub selected: usize,
}

impl<C> ProtocolSplit<C> {
    pub fn selected_reference(&self) -> &SessionCapture<C> {
        &self.reference_pool[self.selected]
    }

    pub fn manifest(&self) -> SplitManifest {
        let frames = |v: &[SessionCapture<C>]| v.iter().map(|c| c.frame_index).collect();
        SplitManifest {
            identity_id: self.identity_id.clone(),
            reference_frames: frames(&self.reference_pool),
            skipped_frames: frames(&self.skipped),
            probe_frames: frames(&self.probes),
            selected_reference_frame: self.selected_reference().frame_index,
            selected_reference_imr: self.selected_reference().imr,
        }
    }
}

/// Frame ids of one identity's split, for exact re-runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub identity_id: String,
    pub reference_frames: Vec<u64>,
    pub skipped_frames: Vec<u64>,
    pub probe_frames: Vec<u64>,
    pub selected_reference_frame: u64,
    pub selected_reference_imr: f64,
}

/// First `n_ref` captures form the reference pool, the next `n_skip` are
/// dropped, the rest are probes.
pub fn split_session<C>(session: IdentitySession<C>, n_ref: usize, n_skip: usize) -> Result<ProtocolSplit<C>> {
    let len = session.captures.len();
    if len <= n_ref + n_skip || n_ref == 0 {
        return Err(Error::SessionTooShort {
            len,
            required: n_ref + n_skip,
        });
    }
    let mut rest = session.captures;
    let probes = rest.split_off(n_ref + n_skip);
    let skipped = rest.split_off(n_ref);
    let selected = select_reference(&rest)?;
    Ok(ProtocolSplit {
        identity_id: session.identity_id,
        reference_pool: rest,
        skipped,
        probes,
        selected,
    })
}

/// Index of the highest-IMR capture; the earliest wins ties.
pub fn select_reference<C>(pool: &[SessionCapture<C>]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in pool.iter().enumerate() {
        match best {
            Some(b) if pool[b].imr >= c.imr => {}
            _ => best = Some(i),
        }
    }
    best.ok_or(Error::EmptyPool)
}

pub const GAP_BINS: usize = 5;
pub const GAP_BIN_LABELS: [&str; GAP_BINS] = ["SG 0-1", "SG 2-3", "SG 4-5", "SG 6-7", "SG >=8"];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapHistogram {
    /// Gaps between consecutive kept probes.
    pub bins: [u64; GAP_BINS],
    /// Longest run of rejected probes, including runs at either end of the
    /// sequence. Bounds every binned gap from above.
    pub max_sg: usize,
    /// Probes rejected before the first kept one. Not part of `bins`.
    pub leading_rejections: usize,
    /// Probes rejected after the last kept one. Not part of `bins`.
    pub trailing_rejections: usize,
}

impl GapHistogram {
    pub fn bin_of(gap: usize) -> usize {
        (gap / 2).min(GAP_BINS - 1)
    }

    pub fn record(&mut self, gap: usize) {
        self.bins[Self::bin_of(gap)] += 1;
        self.max_sg = self.max_sg.max(gap);
    }

    pub fn occurrences(&self) -> u64 {
        self.bins.iter().sum()
    }

    /// Accumulate another identity's histogram.
    pub fn merge(&mut self, other: &GapHistogram) {
        for (a, b) in self.bins.iter_mut().zip(other.bins) {
            *a += b;
        }
        self.max_sg = self.max_sg.max(other.max_sg);
        self.leading_rejections += other.leading_rejections;
        self.trailing_rejections += other.trailing_rejections;
    }
}

/// Keep probes with `imr >= threshold`. Returns kept indices and the gaps
/// (rejected probes strictly between consecutive kept ones).
///
/// `max_sg` also covers the leading and trailing rejected runs: with only
/// interior gaps it could shrink as the threshold rises (dropping the first
/// kept probe turns an interior gap into a leading one).
pub fn filter_probe_imrs(imrs: &[f64], threshold: f64) -> (Vec<usize>, GapHistogram) {
    let mut hist = GapHistogram::default();
    let mut kept = Vec::new();
    let mut last: Option<usize> = None;
    for (i, &imr) in imrs.iter().enumerate() {
        if imr < threshold {
            continue;
        }
        match last {
            Some(prev) => hist.record(i - prev - 1),
            None => hist.leading_rejections = i,
        }
        last = Some(i);
        kept.push(i);
    }
    match last {
        Some(l) => hist.trailing_rejections = imrs.len() - l - 1,
        None => hist.leading_rejections = imrs.len(),
    }
    hist.max_sg = hist.max_sg.max(hist.leading_rejections).max(hist.trailing_rejections);
    (kept, hist)
}

pub fn filter_probes<C>(
    probes: &[SessionCapture<C>],
    threshold: f64,
) -> (Vec<&SessionCapture<C>>, GapHistogram) {
    let imrs: Vec<f64> = probes.iter().map(|p| p.imr).collect();
    let (kept, hist) = filter_probe_imrs(&imrs, threshold);
    (kept.into_iter().map(|i| &probes[i]).collect(), hist)
}

/// One probe-vs-reference comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Trial {
    pub probe_identity: usize,
    /// Index into that identity's probe list.
    pub probe: usize,
    pub reference_identity: usize,
    pub genuine: bool,
}

/// Every kept probe against the selected reference of every identity.
pub fn verification_trials(kept: &[Vec<usize>]) -> Vec<Trial> {
    let n = kept.len();
    let mut out = Vec::new();
    for (pi, probes) in kept.iter().enumerate() {
        for &p in probes {
            for ri in 0..n {
                out.push(Trial {
                    probe_identity: pi,
                    probe: p,
                    reference_identity: ri,
                    genuine: pi == ri,
                });
            }
        }
    }
    out
}
