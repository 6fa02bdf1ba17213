//! Rubber-sheet unrolling of the iris annulus and the iris mask ratio.

use std::f64::consts::PI;
use std::path::Path;

use image::GrayImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::EyeGeometry;
use crate::labels::{Class, EyeCapture};

/// Size of the normalized grid: `angular` columns by `radial` rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedSize {
    pub angular: usize,
    pub radial: usize,
}

impl Default for NormalizedSize {
    fn default() -> Self {
        Self {
            angular: 512,
            radial: 64,
        }
    }
}

/// Unrolled iris texture, row-major with radial rows and angular columns.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedIris {
    angular: usize,
    radial: usize,
    data: Vec<f32>,
}

impl NormalizedIris {
    pub fn from_fn(angular: usize, radial: usize, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut data = Vec::with_capacity(angular * radial);
        for r in 0..radial {
            for a in 0..angular {
                data.push(f(a, r));
            }
        }
        Self { angular, radial, data }
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    pub fn radial(&self) -> usize {
        self.radial
    }

    /// Intensity at angular column `a`, radial row `r`.
    #[inline]
    pub fn get(&self, a: usize, r: usize) -> f32 {
        self.data[r * self.angular + a]
    }

    pub fn row(&self, r: usize) -> &[f32] {
        &self.data[r * self.angular..(r + 1) * self.angular]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    /// Circular shift along angle: column `a` moves to `a + k`.
    pub fn rotate(&self, k: isize) -> Self {
        let n = self.angular as isize;
        Self::from_fn(self.angular, self.radial, |a, r| {
            self.get((a as isize - k).rem_euclid(n) as usize, r)
        })
    }

    pub fn to_image(&self) -> GrayImage {
        let buf = self.data.iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect();
        GrayImage::from_raw(self.angular as u32, self.radial as u32, buf).expect("buffer size")
    }

    pub fn from_image(img: &GrayImage) -> Self {
        Self {
            angular: img.width() as usize,
            radial: img.height() as usize,
            data: img.as_raw().iter().map(|&v| v as f32).collect(),
        }
    }
}

/// Per-pixel validity of a [`NormalizedIris`]; `true` marks iris texture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrisMask {
    angular: usize,
    radial: usize,
    bits: Vec<bool>,
}

impl IrisMask {
    pub fn from_fn(angular: usize, radial: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(angular * radial);
        for r in 0..radial {
            for a in 0..angular {
                bits.push(f(a, r));
            }
        }
        Self { angular, radial, bits }
    }

    pub fn full(angular: usize, radial: usize) -> Self {
        Self {
            angular,
            radial,
            bits: vec![true; angular * radial],
        }
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    pub fn radial(&self) -> usize {
        self.radial
    }

    #[inline]
    pub fn get(&self, a: usize, r: usize) -> bool {
        self.bits[r * self.angular + a]
    }

    #[inline]
    pub fn set(&mut self, a: usize, r: usize, valid: bool) {
        self.bits[r * self.angular + a] = valid;
    }

    pub fn count_valid(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn rotate(&self, k: isize) -> Self {
        let n = self.angular as isize;
        Self::from_fn(self.angular, self.radial, |a, r| {
            self.get((a as isize - k).rem_euclid(n) as usize, r)
        })
    }

    pub fn to_image(&self) -> GrayImage {
        let buf = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        GrayImage::from_raw(self.angular as u32, self.radial as u32, buf).expect("buffer size")
    }

    /// Any non-zero pixel counts as valid.
    pub fn from_image(img: &GrayImage) -> Self {
        Self {
            angular: img.width() as usize,
            radial: img.height() as usize,
            bits: img.as_raw().iter().map(|&v| v != 0).collect(),
        }
    }

    /// Write as a 1-bit grayscale PNG.
    pub fn save_png(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        write_bilevel_png(std::io::BufWriter::new(file), self.angular, self.radial, |a, r| self.get(a, r))
    }
}

/// Encode a `width` x `height` bit plane as a 1-bit grayscale PNG.
pub(crate) fn write_bilevel_png<W: std::io::Write>(
    out: W,
    width: usize,
    height: usize,
    bit: impl Fn(usize, usize) -> bool,
) -> Result<()> {
    let mut enc = png::Encoder::new(out, width as u32, height as u32);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::One);
    let mut writer = enc.write_header().map_err(png_err)?;
    let stride = width.div_ceil(8);
    let mut packed = vec![0u8; stride * height];
    for y in 0..height {
        for x in 0..width {
            if bit(x, y) {
                packed[y * stride + x / 8] |= 0x80 >> (x % 8);
            }
        }
    }
    writer.write_image_data(&packed).map_err(png_err)?;
    writer.finish().map_err(png_err)?;
    Ok(())
}

fn png_err(e: png::EncodingError) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Iris mask ratio in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityScore {
    pub imr: f64,
}

pub fn compute_imr(mask: &IrisMask) -> QualityScore {
    let total = mask.angular * mask.radial;
    let imr = if total == 0 {
        0.0
    } else {
        mask.count_valid() as f64 / total as f64
    };
    QualityScore { imr }
}

/// Source-image coordinate sampled by output pixel (`a`, `r`).
///
/// Angle zero points along +x and increases counter-clockwise as seen on
/// screen (image y grows downward). Radius runs linearly from the pupil
/// circle (row 0) to the limbus circle (last row).
pub fn sample_point(geometry: &EyeGeometry, size: NormalizedSize, a: usize, r: usize) -> (f64, f64) {
    let theta = 2.0 * PI * a as f64 / size.angular as f64;
    let t = if size.radial > 1 {
        r as f64 / (size.radial - 1) as f64
    } else {
        0.0
    };
    let rho = geometry.pupil_radius + (geometry.iris_radius - geometry.pupil_radius) * t;
    let (cx, cy) = geometry.pupil_center;
    (cx + rho * theta.cos(), cy - rho * theta.sin())
}

fn bilinear(img: &GrayImage, x: f64, y: f64) -> f32 {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let x0 = (x.floor() as usize).min(w.saturating_sub(2));
    let y0 = (y.floor() as usize).min(h.saturating_sub(2));
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let px = |xx: usize, yy: usize| img.as_raw()[yy * w + xx] as f64;
    let top = px(x0, y0) * (1.0 - fx) + px(x1, y0) * fx;
    let bottom = px(x0, y1) * (1.0 - fx) + px(x1, y1) * fx;
    (top * (1.0 - fy) + bottom * fy) as f32
}

/// Unroll the iris annulus onto a fixed `size` grid.
///
/// Intensities are bilinearly interpolated. A mask bit is set when the sample
/// lies inside the image and its nearest source label is iris; out-of-image
/// samples carry intensity 0 and an unset mask bit.
pub fn unroll(
    capture: &EyeCapture,
    geometry: &EyeGeometry,
    size: NormalizedSize,
) -> Result<(NormalizedIris, IrisMask)> {
    if !(geometry.pupil_radius >= 0.0 && geometry.iris_radius > geometry.pupil_radius) {
        return Err(Error::DegenerateGeometry {
            pupil_radius: geometry.pupil_radius,
            iris_radius: geometry.iris_radius,
        });
    }
    if size.angular == 0 || size.radial == 0 {
        return Err(Error::ParamMismatch(format!(
            "normalized size {}x{} is empty",
            size.angular, size.radial
        )));
    }
    let (w, h) = (capture.width() as f64, capture.height() as f64);
    let mut texture = Vec::with_capacity(size.angular * size.radial);
    let mut bits = Vec::with_capacity(size.angular * size.radial);
    for r in 0..size.radial {
        for a in 0..size.angular {
            let (x, y) = sample_point(geometry, size, a, r);
            if x >= 0.0 && y >= 0.0 && x <= w - 1.0 && y <= h - 1.0 {
                texture.push(bilinear(&capture.image, x, y));
                let label = capture.labels.get(x.round() as u32, y.round() as u32);
                bits.push(label == Class::Iris);
            } else {
                texture.push(0.0);
                bits.push(false);
            }
        }
    }
    Ok((
        NormalizedIris {
            angular: size.angular,
            radial: size.radial,
            data: texture,
        },
        IrisMask {
            angular: size.angular,
            radial: size.radial,
            bits,
        },
    ))
}

/// Write the texture as an 8-bit PNG and the mask as a 1-bit PNG.
pub fn save_pair(iris: &NormalizedIris, mask: &IrisMask, texture_path: &Path, mask_path: &Path) -> Result<()> {
    iris.to_image().save(texture_path)?;
    mask.save_png(mask_path)?;
    Ok(())
}

pub fn load_pair(texture_path: &Path, mask_path: &Path) -> Result<(NormalizedIris, IrisMask)> {
    for p in [texture_path, mask_path] {
        if !p.is_file() {
            return Err(Error::FileMissing(p.to_path_buf()));
        }
    }
    let tex = image::open(texture_path)?.into_luma8();
    let mask = image::open(mask_path)?.into_luma8();
    if tex.dimensions() != mask.dimensions() {
        return Err(Error::DimensionMismatch {
            image_width: tex.width(),
            image_height: tex.height(),
            label_width: mask.width(),
            label_height: mask.height(),
        });
    }
    Ok((NormalizedIris::from_image(&tex), IrisMask::from_image(&mask)))
}
