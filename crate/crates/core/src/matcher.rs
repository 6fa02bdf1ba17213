//! Masked Hamming distance and its minimum over circular shifts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iriscode::{BitVec, IrisCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DistanceKind {
    #[serde(rename = "HD")]
    Hd,
    #[serde(rename = "SHD")]
    Shd,
}

impl DistanceKind {
    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Hd => "HD",
            DistanceKind::Shd => "SHD",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "HD" => Ok(DistanceKind::Hd),
            "SHD" => Ok(DistanceKind::Shd),
            other => Err(format!("unknown distance `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    /// Largest circular shift tried by SHD, in bit columns.
    pub max_shift: usize,
    /// Fewest jointly valid bits for a comparison to count.
    pub min_overlap: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            max_shift: 8,
            min_overlap: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonScore {
    pub distance: f64,
    pub similarity: f64,
    pub mismatches: usize,
    pub overlap_bits: usize,
    pub shift_used: i32,
}

impl ComparisonScore {
    fn from_counts(mismatches: usize, overlap: usize, shift: i32) -> Self {
        let distance = mismatches as f64 / overlap as f64;
        Self {
            distance,
            similarity: 1.0 - distance,
            mismatches,
            overlap_bits: overlap,
            shift_used: shift,
        }
    }

    /// Score assigned when a comparison cannot be made (e.g. a closed eye):
    /// maximal distance, zero overlap.
    pub fn failed() -> Self {
        Self {
            distance: 1.0,
            similarity: 0.0,
            mismatches: 0,
            overlap_bits: 0,
            shift_used: 0,
        }
    }
}

pub fn to_similarity(score: &ComparisonScore) -> f64 {
    1.0 - score.distance
}

fn check_compatible(a: &IrisCode, b: &IrisCode) -> Result<()> {
    if a.encoder != b.encoder {
        return Err(Error::EncoderMismatch(a.encoder.name(), b.encoder.name()));
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.angular_extent != b.angular_extent {
        return Err(Error::LengthMismatch(a.angular_extent, b.angular_extent));
    }
    Ok(())
}

/// (mismatching valid bits, jointly valid bits)
#[inline]
fn counts(a_code: &BitVec, a_mask: &BitVec, b_code: &BitVec, b_mask: &BitVec) -> (usize, usize) {
    let mut mismatch = 0u32;
    let mut overlap = 0u32;
    for (((ac, am), bc), bm) in a_code
        .words()
        .iter()
        .zip(a_mask.words())
        .zip(b_code.words())
        .zip(b_mask.words())
    {
        let joint = am & bm;
        mismatch += ((ac ^ bc) & joint).count_ones();
        overlap += joint.count_ones();
    }
    (mismatch as usize, overlap as usize)
}

/// Fraction of jointly valid bits that differ.
pub fn hamming(a: &IrisCode, b: &IrisCode, min_overlap: usize) -> Result<ComparisonScore> {
    check_compatible(a, b)?;
    let (m, o) = counts(&a.code, &a.mask, &b.code, &b.mask);
    if o < min_overlap.max(1) {
        return Err(Error::InsufficientOverlap {
            overlap: o,
            required: min_overlap.max(1),
        });
    }
    Ok(ComparisonScore::from_counts(m, o, 0))
}

/// Minimum masked Hamming distance over shifts of `b` by `-max_shift..=max_shift`
/// bit columns. Ties go to the smallest |shift|, negative first. Shifts with
/// too little overlap are skipped.
pub fn shifted_hamming(a: &IrisCode, b: &IrisCode, config: &MatchConfig) -> Result<ComparisonScore> {
    check_compatible(a, b)?;
    let required = config.min_overlap.max(1);
    let mut best: Option<(usize, usize, i32)> = None;
    let mut best_overlap = 0;
    for step in 0..=2 * config.max_shift {
        let shift = if step == 0 {
            0
        } else if step % 2 == 1 {
            -((step as isize + 1) / 2)
        } else {
            step as isize / 2
        };
        let (m, o) = if shift == 0 {
            counts(&a.code, &a.mask, &b.code, &b.mask)
        } else {
            let code = b.code.rotate_rows(b.angular_extent, shift);
            let mask = b.mask.rotate_rows(b.angular_extent, shift);
            counts(&a.code, &a.mask, &code, &mask)
        };
        best_overlap = best_overlap.max(o);
        if o < required {
            continue;
        }
        let better = match best {
            None => true,
            // m / o < bm / bo without rounding
            Some((bm, bo, _)) => (m as u64) * (bo as u64) < (bm as u64) * (o as u64),
        };
        if better {
            best = Some((m, o, shift as i32));
        }
    }
    match best {
        Some((m, o, s)) => Ok(ComparisonScore::from_counts(m, o, s)),
        None => Err(Error::InsufficientOverlap {
            overlap: best_overlap,
            required,
        }),
    }
}

/// Score with the chosen distance.
pub fn compare(a: &IrisCode, b: &IrisCode, kind: DistanceKind, config: &MatchConfig) -> Result<ComparisonScore> {
    match kind {
        DistanceKind::Hd => hamming(a, b, config.min_overlap),
        DistanceKind::Shd => shifted_hamming(a, b, config),
    }
}
