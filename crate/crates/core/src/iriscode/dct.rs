//! DCT of overlapping angular patches, binarized by the sign of the
//! coefficient change between neighbouring patches.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{BitVec, EncoderKind, IrisCode};
use crate::error::{Error, Result};
use crate::normalize::{IrisMask, NormalizedIris, NormalizedSize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DctParams {
    /// Patch extent along angle, in pixels.
    pub patch_width: usize,
    /// Patch extent along radius, in pixels.
    pub patch_height: usize,
    /// Fractional overlap of angularly adjacent patches, in `[0, 1)`.
    pub overlap: f64,
    /// AC coefficients kept per patch, starting at coefficient 1.
    pub coeffs_kept: usize,
}

impl Default for DctParams {
    fn default() -> Self {
        Self {
            patch_width: 16,
            patch_height: 8,
            overlap: 0.5,
            coeffs_kept: 4,
        }
    }
}

impl DctParams {
    pub(crate) fn stride(&self) -> Result<usize> {
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::ParamMismatch(format!("overlap {} outside [0, 1)", self.overlap)));
        }
        let stride = (self.patch_width as f64 * (1.0 - self.overlap)).round() as usize;
        if stride == 0 {
            return Err(Error::ParamMismatch("patch stride rounds to zero".into()));
        }
        Ok(stride)
    }

    /// (angular positions, radial stacks). Patches wrap around the circle, so
    /// there is one position per stride.
    pub(crate) fn tiling(&self, size: NormalizedSize) -> Result<(usize, usize)> {
        if self.patch_width < 2 || self.patch_height == 0 {
            return Err(Error::ParamMismatch("DCT patch too small".into()));
        }
        if self.coeffs_kept == 0 || self.coeffs_kept >= self.patch_width {
            return Err(Error::ParamMismatch(format!(
                "{} AC coefficients from a {}-sample patch",
                self.coeffs_kept, self.patch_width
            )));
        }
        let stride = self.stride()?;
        if !size.angular.is_multiple_of(stride) || self.patch_width > size.angular {
            return Err(Error::ParamMismatch(format!(
                "stride {stride} does not tile {} angular samples",
                size.angular
            )));
        }
        if !size.radial.is_multiple_of(self.patch_height) {
            return Err(Error::ParamMismatch(format!(
                "patch height {} does not divide {} radial samples",
                self.patch_height, size.radial
            )));
        }
        let positions = size.angular / stride;
        if positions < 2 {
            return Err(Error::ParamMismatch("need at least two angular patches".into()));
        }
        Ok((positions, size.radial / self.patch_height))
    }
}

/// Unnormalized DCT-II coefficient `k` of `x`.
pub fn dct2_coefficient(x: &[f64], k: usize) -> f64 {
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, v)| v * (PI * (i as f64 + 0.5) * k as f64 / n).cos())
        .sum()
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * (i as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// Encode with overlapping angular patches.
///
/// Each patch is averaged across its radial extent (invalid pixels replaced
/// by the mean of the patch's valid pixels), windowed with a raised cosine
/// and transformed. Bit `(stack, p, k)` is set when AC coefficient `k + 1`
/// grows from patch `p` to patch `p + 1` (wrapping); it is valid when both
/// patches are at least half valid.
pub fn encode_dct(iris: &NormalizedIris, mask: &IrisMask, params: &DctParams) -> Result<IrisCode> {
    super::check_dims(iris, mask)?;
    let size = NormalizedSize {
        angular: iris.angular(),
        radial: iris.radial(),
    };
    let (positions, stacks) = params.tiling(size)?;
    let stride = params.stride()?;
    let (pw, ph, kept) = (params.patch_width, params.patch_height, params.coeffs_kept);
    let window = hann(pw);
    let basis: Vec<Vec<f64>> = (1..=kept)
        .map(|k| {
            (0..pw)
                .map(|i| (PI * (i as f64 + 0.5) * k as f64 / pw as f64).cos())
                .collect()
        })
        .collect();

    let extent = positions * kept;
    let mut code = BitVec::zeros(extent * stacks);
    let mut valid = BitVec::zeros(extent * stacks);
    let mut coeffs = vec![0.0f64; positions * kept];
    let mut patch_ok = vec![false; positions];
    let mut profile = vec![0.0f64; pw];

    for s in 0..stacks {
        let rows = s * ph..(s + 1) * ph;
        for p in 0..positions {
            let cols: Vec<usize> = (0..pw).map(|i| (p * stride + i) % size.angular).collect();
            let mut sum = 0.0;
            let mut n_valid = 0usize;
            for &a in &cols {
                for r in rows.clone() {
                    if mask.get(a, r) {
                        sum += iris.get(a, r) as f64;
                        n_valid += 1;
                    }
                }
            }
            patch_ok[p] = 2 * n_valid >= pw * ph;
            let fill = if n_valid > 0 { sum / n_valid as f64 } else { 0.0 };
            for (i, &a) in cols.iter().enumerate() {
                let col_sum: f64 = rows
                    .clone()
                    .map(|r| if mask.get(a, r) { iris.get(a, r) as f64 } else { fill })
                    .sum();
                profile[i] = col_sum / ph as f64 * window[i];
            }
            for (k, b) in basis.iter().enumerate() {
                coeffs[p * kept + k] = profile.iter().zip(b).map(|(x, c)| x * c).sum();
            }
        }
        let row = s * extent;
        for p in 0..positions {
            let q = (p + 1) % positions;
            let ok = patch_ok[p] && patch_ok[q];
            for k in 0..kept {
                let i = row + p * kept + k;
                code.set(i, coeffs[q * kept + k] - coeffs[p * kept + k] > 0.0);
                valid.set(i, ok);
            }
        }
    }
    IrisCode::new(EncoderKind::Dct, code, valid, extent)
}
