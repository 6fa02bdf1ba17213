//! Binary iris templates and the three handcrafted encoders.
//!
//! Every code is laid out row-major: one row per radial unit (band, patch
//! stack or cell row) and `angular_extent` bit columns per row covering the
//! full circle. Rotating the eye therefore rotates each row, which is what
//! the shifted matcher undoes.

mod bits;
mod csbca;
mod dct;
mod log_gabor;
pub mod template;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bits::BitVec;
pub use csbca::{encode_csbca, upward_slope_flags, CsbcaParams};
pub use dct::{dct2_coefficient, encode_dct, DctParams};
pub use log_gabor::{encode_log_gabor, log_gabor_response, LogGaborParams};

use crate::error::{Error, Result};
use crate::normalize::{IrisMask, NormalizedIris, NormalizedSize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EncoderKind {
    #[serde(rename = "LG", alias = "LogGabor")]
    LogGabor,
    #[serde(rename = "DCT", alias = "Dct")]
    Dct,
    #[serde(rename = "CSBCA", alias = "Csbca")]
    Csbca,
}

impl EncoderKind {
    pub const ALL: [EncoderKind; 3] = [EncoderKind::LogGabor, EncoderKind::Dct, EncoderKind::Csbca];

    pub fn name(self) -> &'static str {
        match self {
            EncoderKind::LogGabor => "LG",
            EncoderKind::Dct => "DCT",
            EncoderKind::Csbca => "CSBCA",
        }
    }

    /// Numeric id stored in template headers.
    pub fn id(self) -> u32 {
        match self {
            EncoderKind::LogGabor => 1,
            EncoderKind::Dct => 2,
            EncoderKind::Csbca => 3,
        }
    }

    pub fn from_id(id: u32) -> Option<Self> {
        match id {
            1 => Some(EncoderKind::LogGabor),
            2 => Some(EncoderKind::Dct),
            3 => Some(EncoderKind::Csbca),
            _ => None,
        }
    }
}

impl fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncoderKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "LG" | "LOGGABOR" | "LOG_GABOR" => Ok(EncoderKind::LogGabor),
            "DCT" => Ok(EncoderKind::Dct),
            "CSBCA" => Ok(EncoderKind::Csbca),
            other => Err(format!("unknown encoder `{other}`")),
        }
    }
}

/// Binary template: code bits, validity bits and the row width that spans
/// the full circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrisCode {
    pub encoder: EncoderKind,
    pub code: BitVec,
    pub mask: BitVec,
    pub angular_extent: usize,
}

impl IrisCode {
    pub fn new(encoder: EncoderKind, code: BitVec, mask: BitVec, angular_extent: usize) -> Result<Self> {
        if code.len() != mask.len() {
            return Err(Error::LengthMismatch(code.len(), mask.len()));
        }
        if code.is_empty() || angular_extent == 0 || !code.len().is_multiple_of(angular_extent) {
            return Err(Error::BadTemplate(format!(
                "{} bits is not a positive multiple of angular extent {}",
                code.len(),
                angular_extent
            )));
        }
        Ok(Self {
            encoder,
            code,
            mask,
            angular_extent,
        })
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.code.len() / self.angular_extent
    }

    /// Circularly rotate code and mask together by `shift` bit columns.
    pub fn rotate(&self, shift: isize) -> Self {
        Self {
            encoder: self.encoder,
            code: self.code.rotate_rows(self.angular_extent, shift),
            mask: self.mask.rotate_rows(self.angular_extent, shift),
            angular_extent: self.angular_extent,
        }
    }

    /// Bytes of the bit-packed code plus mask, without header.
    pub fn packed_bytes(&self) -> usize {
        2 * self.code.words().len() * 8
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncoderParams {
    pub log_gabor: LogGaborParams,
    pub dct: DctParams,
    pub csbca: CsbcaParams,
}

impl EncoderParams {
    /// Texture shift (pixels) that moves the code by a whole number of bit
    /// columns, and that number of columns. `None` when no sub-circle shift
    /// keeps the code layout intact.
    pub fn angular_stride(&self, kind: EncoderKind, size: NormalizedSize) -> Option<(usize, usize)> {
        match kind {
            EncoderKind::LogGabor => Some((1, 2)),
            EncoderKind::Dct => {
                let stride = self.dct.stride().ok()?;
                Some((stride, self.dct.coeffs_kept))
            }
            EncoderKind::Csbca => {
                let cells = size.angular / self.csbca.cell_width.max(1);
                let g = self.csbca.group_size;
                if g == 0 || !cells.is_multiple_of(g) || cells == g {
                    None
                } else {
                    Some((g * self.csbca.cell_width, 2 * g))
                }
            }
        }
    }

    /// Number of code bits produced for a given normalized size.
    pub fn code_len(&self, kind: EncoderKind, size: NormalizedSize) -> Result<usize> {
        match kind {
            EncoderKind::LogGabor => {
                self.log_gabor.validate(size)?;
                Ok(size.angular * self.log_gabor.radial_bands * 2)
            }
            EncoderKind::Dct => {
                let (positions, stacks) = self.dct.tiling(size)?;
                Ok(positions * stacks * self.dct.coeffs_kept)
            }
            EncoderKind::Csbca => {
                let (cx, cy) = self.csbca.cells(size)?;
                Ok(cx * cy * 2)
            }
        }
    }
}

/// Encode with the selected encoder.
pub fn encode(kind: EncoderKind, iris: &NormalizedIris, mask: &IrisMask, params: &EncoderParams) -> Result<IrisCode> {
    check_dims(iris, mask)?;
    match kind {
        EncoderKind::LogGabor => encode_log_gabor(iris, mask, &params.log_gabor),
        EncoderKind::Dct => encode_dct(iris, mask, &params.dct),
        EncoderKind::Csbca => encode_csbca(iris, mask, &params.csbca),
    }
}

pub(crate) fn check_dims(iris: &NormalizedIris, mask: &IrisMask) -> Result<()> {
    if (iris.angular(), iris.radial()) != (mask.angular(), mask.radial()) {
        return Err(Error::ParamMismatch(format!(
            "texture {}x{} vs mask {}x{}",
            iris.angular(),
            iris.radial(),
            mask.angular(),
            mask.radial()
        )));
    }
    Ok(())
}
