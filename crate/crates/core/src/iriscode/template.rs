//! On-disk template format.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "IRC1"
//! 4       4     encoder id (u32 LE; 1 = LG, 2 = DCT, 3 = CSBCA)
//! 8       4     angular extent in bit columns (u32 LE)
//! 12      4     bit length (u32 LE)
//! 16      8*W   code words (u64 LE), W = ceil(bits / 64)
//! 16+8W   8*W   mask words (u64 LE)
//! ```

use std::path::Path;

use super::{BitVec, EncoderKind, IrisCode};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"IRC1";
pub const HEADER_LEN: usize = 16;

pub fn to_bytes(code: &IrisCode) -> Vec<u8> {
    let words = code.code.words().len();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * words);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&code.encoder.id().to_le_bytes());
    out.extend_from_slice(&(code.angular_extent as u32).to_le_bytes());
    out.extend_from_slice(&(code.len() as u32).to_le_bytes());
    for w in code.code.words().iter().chain(code.mask.words()) {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<IrisCode> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::BadTemplate("missing IRC1 header".into()));
    }
    let field = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let encoder = EncoderKind::from_id(field(4))
        .ok_or_else(|| Error::BadTemplate(format!("unknown encoder id {}", field(4))))?;
    let extent = field(8) as usize;
    let len = field(12) as usize;
    let words = len.div_ceil(64);
    if bytes.len() != HEADER_LEN + 16 * words {
        return Err(Error::BadTemplate(format!(
            "expected {} bytes for {len} bits, found {}",
            HEADER_LEN + 16 * words,
            bytes.len()
        )));
    }
    let read_words = |start: usize| -> Vec<u64> {
        bytes[start..start + 8 * words]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect()
    };
    let code_words = read_words(HEADER_LEN);
    let mask_words = read_words(HEADER_LEN + 8 * words);
    IrisCode::new(
        encoder,
        BitVec::from_words(len, code_words),
        BitVec::from_words(len, mask_words),
        extent,
    )
}

/// Code rows stacked above mask rows as a 1-bit PNG, one pixel per bit.
pub fn to_png(code: &IrisCode) -> Result<Vec<u8>> {
    let (w, rows) = (code.angular_extent, code.rows());
    let mut out = Vec::new();
    crate::normalize::write_bilevel_png(&mut out, w, 2 * rows, |x, y| {
        if y < rows {
            code.code.get(y * w + x)
        } else {
            code.mask.get((y - rows) * w + x)
        }
    })?;
    Ok(out)
}

pub fn save(code: &IrisCode, path: &Path) -> Result<()> {
    std::fs::write(path, to_bytes(code))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<IrisCode> {
    if !path.is_file() {
        return Err(Error::FileMissing(path.to_path_buf()));
    }
    from_bytes(&std::fs::read(path)?)
}
