//! Cumulative-sum change analysis over grouped cell means.

use serde::{Deserialize, Serialize};

use super::{BitVec, EncoderKind, IrisCode};
use crate::error::{Error, Result};
use crate::normalize::{IrisMask, NormalizedIris, NormalizedSize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsbcaParams {
    /// Cell extent along angle, in pixels.
    pub cell_width: usize,
    /// Cell extent along radius, in pixels.
    pub cell_height: usize,
    /// Cells per horizontal / vertical group.
    pub group_size: usize,
}

impl Default for CsbcaParams {
    fn default() -> Self {
        Self {
            cell_width: 8,
            cell_height: 4,
            group_size: 5,
        }
    }
}

impl CsbcaParams {
    pub(crate) fn cells(&self, size: NormalizedSize) -> Result<(usize, usize)> {
        if self.cell_width == 0 || self.cell_height == 0 || self.group_size == 0 {
            return Err(Error::ParamMismatch("CSBCA sizes must be positive".into()));
        }
        if !size.angular.is_multiple_of(self.cell_width) || !size.radial.is_multiple_of(self.cell_height) {
            return Err(Error::ParamMismatch(format!(
                "{}x{} cells do not tile a {}x{} texture",
                self.cell_width, self.cell_height, size.angular, size.radial
            )));
        }
        Ok((size.angular / self.cell_width, size.radial / self.cell_height))
    }
}

/// Flags the values that lie on the rising stretch of the cumulative sum.
///
/// With `S_0 = 0` and `S_k = S_{k-1} + (x_{k-1} - mean)`, value `i` moves the
/// sum from `S_i` to `S_{i+1}`. Taking the first minimum `S_lo` and the last
/// maximum `S_hi`, value `i` is flagged when `lo <= i < hi`. A flat sum flags
/// nothing.
pub fn upward_slope_flags(values: &[f64]) -> Vec<bool> {
    let n = values.len();
    let mut flags = vec![false; n];
    if n < 2 {
        return flags;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut sums = Vec::with_capacity(n + 1);
    sums.push(0.0);
    let mut acc = 0.0;
    for v in values {
        acc += v - mean;
        sums.push(acc);
    }
    // the deviations sum to zero; drop the rounding residue
    sums[n] = 0.0;

    let scale = values.iter().map(|v| (v - mean).abs()).sum::<f64>();
    let mut lo = 0;
    let mut hi = 0;
    for (i, &s) in sums.iter().enumerate() {
        if s < sums[lo] {
            lo = i;
        }
        if s >= sums[hi] {
            hi = i;
        }
    }
    if sums[hi] - sums[lo] <= 1e-9 * (1.0 + scale) {
        return flags;
    }
    if lo < hi {
        for f in &mut flags[lo..hi] {
            *f = true;
        }
    }
    flags
}

/// Encode with cumulative-sum change analysis.
///
/// Cell means are taken over valid pixels; cells less than half valid are
/// masked and left out of their groups. Groups are consecutive runs of
/// `group_size` cells along angle (horizontal) and along radius (vertical),
/// with a shorter trailing group when the count does not divide. Each cell
/// emits `(horizontal, vertical)` bits.
pub fn encode_csbca(iris: &NormalizedIris, mask: &IrisMask, params: &CsbcaParams) -> Result<IrisCode> {
    super::check_dims(iris, mask)?;
    let size = NormalizedSize {
        angular: iris.angular(),
        radial: iris.radial(),
    };
    let (nx, ny) = params.cells(size)?;
    let (cw, ch, g) = (params.cell_width, params.cell_height, params.group_size);

    let mut means = vec![0.0f64; nx * ny];
    let mut ok = vec![false; nx * ny];
    for cy in 0..ny {
        for cx in 0..nx {
            let mut sum = 0.0;
            let mut n = 0usize;
            for r in cy * ch..(cy + 1) * ch {
                for a in cx * cw..(cx + 1) * cw {
                    if mask.get(a, r) {
                        sum += iris.get(a, r) as f64;
                        n += 1;
                    }
                }
            }
            let idx = cy * nx + cx;
            ok[idx] = 2 * n >= cw * ch;
            if n > 0 {
                means[idx] = sum / n as f64;
            }
        }
    }

    let mut horizontal = vec![false; nx * ny];
    let mut vertical = vec![false; nx * ny];
    let analyse = |cells: &[usize], out: &mut Vec<bool>| {
        let used: Vec<usize> = cells.iter().copied().filter(|&i| ok[i]).collect();
        let vals: Vec<f64> = used.iter().map(|&i| means[i]).collect();
        for (&i, f) in used.iter().zip(upward_slope_flags(&vals)) {
            out[i] = f;
        }
    };
    for cy in 0..ny {
        for start in (0..nx).step_by(g) {
            let group: Vec<usize> = (start..(start + g).min(nx)).map(|cx| cy * nx + cx).collect();
            analyse(&group, &mut horizontal);
        }
    }
    for cx in 0..nx {
        for start in (0..ny).step_by(g) {
            let group: Vec<usize> = (start..(start + g).min(ny)).map(|cy| cy * nx + cx).collect();
            analyse(&group, &mut vertical);
        }
    }

    let mut code = BitVec::zeros(nx * ny * 2);
    let mut valid = BitVec::zeros(nx * ny * 2);
    for idx in 0..nx * ny {
        code.set(2 * idx, horizontal[idx]);
        code.set(2 * idx + 1, vertical[idx]);
        valid.set(2 * idx, ok[idx]);
        valid.set(2 * idx + 1, ok[idx]);
    }
    IrisCode::new(EncoderKind::Csbca, code, valid, 2 * nx)
}
