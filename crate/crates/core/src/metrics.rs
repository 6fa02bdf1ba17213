//! ROC, EER, FMR10 and AUC over similarity scores (higher = more genuine).
//!
//! All operating points sit on a threshold grid made of the observed scores
//! plus one sentinel below the minimum and one above the maximum. Counts
//! are kept as integers so comparisons between grid points are exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreSet {
    pub genuine: Vec<f64>,
    pub impostor: Vec<f64>,
}

impl ScoreSet {
    pub fn new(genuine: Vec<f64>, impostor: Vec<f64>) -> Self {
        Self { genuine, impostor }
    }

    fn check(&self) -> Result<()> {
        if self.genuine.is_empty() || self.impostor.is_empty() {
            return Err(Error::EmptyScores);
        }
        if let Some(&bad) = self.genuine.iter().chain(&self.impostor).find(|v| !v.is_finite()) {
            return Err(Error::InvalidScore(bad));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fmr: f64,
    pub fnmr: f64,
    /// Impostor scores `>= threshold`.
    pub impostor_accepted: usize,
    /// Genuine scores `< threshold`.
    pub genuine_rejected: usize,
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Operating points in increasing threshold order.
pub fn roc(scores: &ScoreSet) -> Result<Vec<RocPoint>> {
    scores.check()?;
    let gen = sorted(&scores.genuine);
    let imp = sorted(&scores.impostor);
    let (ng, ni) = (gen.len(), imp.len());

    let mut grid: Vec<f64> = gen.iter().chain(&imp).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let lo = grid[0] - 1.0;
    let hi = grid[grid.len() - 1] + 1.0;

    let mut out = Vec::with_capacity(grid.len() + 2);
    // g: genuine below t; i: impostor below t
    let (mut g, mut i) = (0usize, 0usize);
    for t in std::iter::once(lo).chain(grid).chain(std::iter::once(hi)) {
        while g < ng && gen[g] < t {
            g += 1;
        }
        while i < ni && imp[i] < t {
            i += 1;
        }
        out.push(RocPoint {
            threshold: t,
            fmr: (ni - i) as f64 / ni as f64,
            fnmr: g as f64 / ng as f64,
            impostor_accepted: ni - i,
            genuine_rejected: g,
        });
    }
    Ok(out)
}

/// |fmr - fnmr| scaled by `ng * ni`, exact.
fn imbalance(p: &RocPoint, ng: usize, ni: usize) -> u128 {
    let a = p.impostor_accepted as u128 * ng as u128;
    let b = p.genuine_rejected as u128 * ni as u128;
    a.abs_diff(b)
}

fn eer_on(points: &[RocPoint], ng: usize, ni: usize) -> (f64, f64) {
    let mut best = &points[0];
    for p in &points[1..] {
        if imbalance(p, ng, ni) < imbalance(best, ng, ni) {
            best = p;
        }
    }
    ((best.fmr + best.fnmr) / 2.0, best.threshold)
}

/// `(eer, eer_threshold)`: the grid point with the smallest |fmr - fnmr|,
/// lowest threshold on ties.
pub fn eer(scores: &ScoreSet) -> Result<(f64, f64)> {
    let points = roc(scores)?;
    Ok(eer_on(&points, scores.genuine.len(), scores.impostor.len()))
}

fn fmr10_on(points: &[RocPoint], ni: usize) -> Result<f64> {
    points
        .iter()
        .filter(|p| p.impostor_accepted * 10 <= ni)
        .map(|p| p.fnmr)
        .min_by(f64::total_cmp)
        .ok_or(Error::NoQualifyingThreshold)
}

/// Lowest FNMR among thresholds with FMR at most 10%.
pub fn fmr10(scores: &ScoreSet) -> Result<f64> {
    let points = roc(scores)?;
    fmr10_on(&points, scores.impostor.len())
}

fn auc_on(points: &[RocPoint], ng: usize, ni: usize) -> f64 {
    // Trapezoids in integer units: d(accepted impostors) * (tp_a + tp_b).
    let mut twice_area: u128 = 0;
    for w in points.windows(2) {
        let dx = (w[0].impostor_accepted - w[1].impostor_accepted) as u128;
        let tp = (ng - w[0].genuine_rejected + ng - w[1].genuine_rejected) as u128;
        twice_area += dx * tp;
    }
    twice_area as f64 / (2.0 * ng as f64 * ni as f64)
}

/// Trapezoidal area under `(fmr, 1 - fnmr)`.
pub fn auc(scores: &ScoreSet) -> Result<f64> {
    let points = roc(scores)?;
    Ok(auc_on(&points, scores.genuine.len(), scores.impostor.len()))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub eer: f64,
    pub eer_threshold: f64,
    pub fmr10: f64,
    pub auc: f64,
    pub n_genuine: usize,
    pub n_impostor: usize,
    #[serde(skip)]
    pub roc_points: Vec<RocPoint>,
}

/// All metrics from one sweep.
pub fn evaluate(scores: &ScoreSet) -> Result<Metrics> {
    let points = roc(scores)?;
    let (ng, ni) = (scores.genuine.len(), scores.impostor.len());
    let (eer, eer_threshold) = eer_on(&points, ng, ni);
    Ok(Metrics {
        eer,
        eer_threshold,
        fmr10: fmr10_on(&points, ni)?,
        auc: auc_on(&points, ng, ni),
        n_genuine: ng,
        n_impostor: ni,
        roc_points: points,
    })
}

/// One evaluated setting, as written to the metrics JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub encoder: String,
    pub distance_kind: String,
    pub imr_threshold: f64,
    #[serde(flatten)]
    pub metrics: Metrics,
}
