//! Pupil and limbus circle fitting and the coarse iris crop.

use image::GrayImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{Class, EyeCapture, LabelMap};

/// Concentric pupil/limbus circles centred on the pupil's center of moment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EyeGeometry {
    pub pupil_center: (f64, f64),
    pub pupil_radius: f64,
    pub iris_radius: f64,
}

impl EyeGeometry {
    pub fn new(pupil_center: (f64, f64), pupil_radius: f64, iris_radius: f64) -> Result<Self> {
        if !(pupil_radius >= 0.0 && iris_radius > pupil_radius) {
            return Err(Error::DegenerateGeometry {
                pupil_radius,
                iris_radius,
            });
        }
        Ok(Self {
            pupil_center,
            pupil_radius,
            iris_radius,
        })
    }
}

/// Fit the rubber-sheet circles to a refined label map.
///
/// The pupil radius is the distance from the pupil centroid to the closest
/// pupil boundary pixel (a pupil pixel with a 4-neighbour that is not pupil,
/// or that touches the image border). The iris radius is the distance to the
/// furthest iris pixel.
pub fn fit_eye_geometry(labels: &LabelMap) -> Result<EyeGeometry> {
    let (w, h) = (labels.width(), labels.height());
    let mut n = 0usize;
    let (mut sx, mut sy) = (0.0f64, 0.0f64);
    let mut any_iris = false;
    for y in 0..h {
        for x in 0..w {
            match labels.get(x, y) {
                Class::Pupil => {
                    n += 1;
                    sx += x as f64;
                    sy += y as f64;
                }
                Class::Iris => any_iris = true,
                _ => {}
            }
        }
    }
    if n == 0 {
        return Err(Error::NoPupil);
    }
    if !any_iris {
        return Err(Error::NoIris);
    }
    let (cx, cy) = (sx / n as f64, sy / n as f64);

    let is_pupil = |x: i64, y: i64| {
        x >= 0 && y >= 0 && x < w as i64 && y < h as i64 && labels.get(x as u32, y as u32) == Class::Pupil
    };
    let mut pupil_r2 = f64::INFINITY;
    let mut iris_r2 = 0.0f64;
    for y in 0..h {
        for x in 0..w {
            let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
            match labels.get(x, y) {
                Class::Pupil => {
                    let (xi, yi) = (x as i64, y as i64);
                    let boundary = !is_pupil(xi - 1, yi)
                        || !is_pupil(xi + 1, yi)
                        || !is_pupil(xi, yi - 1)
                        || !is_pupil(xi, yi + 1);
                    if boundary && d2 < pupil_r2 {
                        pupil_r2 = d2;
                    }
                }
                Class::Iris => iris_r2 = iris_r2.max(d2),
                _ => {}
            }
        }
    }
    let pupil_radius = pupil_r2.sqrt();
    let iris_radius = iris_r2.sqrt();
    EyeGeometry::new((cx, cy), pupil_radius, iris_radius)
}

/// Tight axis-aligned box, inclusive on both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseBox {
    pub min_x: u32,
    pub min_y: u32,
    pub max_x: u32,
    pub max_y: u32,
}

impl CoarseBox {
    pub fn width(&self) -> u32 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> u32 {
        self.max_y - self.min_y + 1
    }
}

/// Bounding box of iris and pupil pixels.
pub fn iris_box(labels: &LabelMap) -> Result<CoarseBox> {
    let mut bbox: Option<CoarseBox> = None;
    for y in 0..labels.height() {
        for x in 0..labels.width() {
            if matches!(labels.get(x, y), Class::Iris | Class::Pupil) {
                bbox = Some(match bbox {
                    None => CoarseBox {
                        min_x: x,
                        min_y: y,
                        max_x: x,
                        max_y: y,
                    },
                    Some(b) => CoarseBox {
                        min_x: b.min_x.min(x),
                        min_y: b.min_y.min(y),
                        max_x: b.max_x.max(x),
                        max_y: b.max_y.max(y),
                    },
                });
            }
        }
    }
    bbox.ok_or(Error::NoIris)
}

/// Crop the eye image to the box around iris and pupil.
pub fn coarse_crop(capture: &EyeCapture) -> Result<(CoarseBox, GrayImage)> {
    let b = iris_box(&capture.labels)?;
    let crop = image::imageops::crop_imm(&capture.image, b.min_x, b.min_y, b.width(), b.height()).to_image();
    Ok((b, crop))
}
