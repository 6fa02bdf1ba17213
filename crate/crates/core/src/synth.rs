//! Seeded synthetic eye captures for tests, benchmarks and the demo.
//!
//! An identity is a smooth iris texture defined in (angle, normalized
//! radius) coordinates, so it survives pupil dilation unchanged. Frames vary
//! the eye position, pupil size, in-plane rotation, eyelid height and sensor
//! noise; a few frames are blinks with no visible iris.

use std::f64::consts::PI;
use std::path::Path;

use image::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset;
use crate::error::Result;
use crate::labels::{Class, EyeCapture, LabelMap};

const SKIN: f64 = 150.0;
const SCLERA: f64 = 205.0;
const PUPIL: f64 = 18.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wave {
    /// Whole cycles around the circle.
    pub angular_cycles: u32,
    /// Cycles from the pupil edge to the limbus.
    pub radial_cycles: f64,
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrisTexture {
    pub base: f64,
    pub waves: Vec<Wave>,
}

impl IrisTexture {
    /// Random texture with `n_waves` components of at most `max_cycles`
    /// angular cycles.
    pub fn random(seed: u64, n_waves: usize, max_cycles: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let waves = (0..n_waves)
            .map(|_| Wave {
                angular_cycles: rng.gen_range(1..=max_cycles.max(1)),
                radial_cycles: rng.gen_range(0.0..2.5),
                amplitude: rng.gen_range(4.0..14.0),
                phase: rng.gen_range(0.0..2.0 * PI),
            })
            .collect();
        Self {
            base: rng.gen_range(90.0..120.0),
            waves,
        }
    }

    /// Intensity at angle `theta` and normalized radius `t` in `[0, 1]`.
    pub fn value(&self, theta: f64, t: f64) -> f64 {
        self.base
            + self
                .waves
                .iter()
                .map(|w| {
                    w.amplitude
                        * (w.angular_cycles as f64 * theta + 2.0 * PI * w.radial_cycles * t + w.phase).cos()
                })
                .sum::<f64>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EyeParams {
    pub width: u32,
    pub height: u32,
    pub center: (f64, f64),
    pub pupil_radius: f64,
    pub iris_radius: f64,
    /// Counter-clockwise texture rotation, radians.
    pub rotation: f64,
    /// Height of the upper eyelid edge as a fraction of the iris diameter,
    /// measured down from the top of the iris. 0 leaves the iris clear.
    pub eyelid: f64,
    pub noise_sigma: f64,
    pub closed: bool,
}

impl Default for EyeParams {
    fn default() -> Self {
        Self {
            width: 320,
            height: 240,
            center: (160.0, 120.0),
            pupil_radius: 24.0,
            iris_radius: 62.0,
            rotation: 0.0,
            eyelid: 0.0,
            noise_sigma: 0.0,
            closed: false,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Draw one frame. `noise_seed` drives the sensor noise only.
pub fn render(texture: &IrisTexture, p: &EyeParams, noise_seed: u64) -> (GrayImage, LabelMap) {
    let (cx, cy) = p.center;
    let lid_y = cy - p.iris_radius + 2.0 * p.iris_radius * p.eyelid;
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    let mut labels = LabelMap::new(p.width, p.height, Class::Background);
    let mut img = GrayImage::new(p.width, p.height);
    for y in 0..p.height {
        for x in 0..p.width {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let rho = dx.hypot(dy);
            let covered = p.closed || (p.eyelid > 0.0 && (y as f64) < lid_y);
            let in_sclera = (dx / (2.4 * p.iris_radius)).powi(2) + (dy / (1.3 * p.iris_radius)).powi(2) <= 1.0;
            let (class, v) = if covered {
                (Class::Background, SKIN)
            } else if rho < p.pupil_radius {
                (Class::Pupil, PUPIL)
            } else if rho <= p.iris_radius {
                let t = (rho - p.pupil_radius) / (p.iris_radius - p.pupil_radius);
                let theta = (-dy).atan2(dx);
                (Class::Iris, texture.value(theta - p.rotation, t))
            } else if in_sclera {
                (Class::Sclera, SCLERA)
            } else {
                (Class::Background, SKIN)
            };
            let noise = if p.noise_sigma > 0.0 {
                p.noise_sigma * gaussian(&mut rng)
            } else {
                0.0
            };
            labels.set(x, y, class);
            img.put_pixel(x, y, image::Luma([(v + noise).round().clamp(0.0, 255.0) as u8]));
        }
    }
    (img, labels)
}

/// Session-level variation.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionStyle {
    pub width: u32,
    pub height: u32,
    pub texture_waves: usize,
    pub max_angular_cycles: u32,
    /// Largest in-plane rotation, in samples of a 512-column unrolling.
    pub max_rotation_samples: f64,
    pub center_jitter: f64,
    pub noise_sigma: f64,
    pub blink_rate: f64,
    /// Probability of a heavily occluded frame.
    pub occlusion_rate: f64,
}

impl Default for SessionStyle {
    fn default() -> Self {
        Self {
            width: 320,
            height: 240,
            texture_waves: 24,
            max_angular_cycles: 40,
            max_rotation_samples: 5.0,
            center_jitter: 4.0,
            noise_sigma: 18.0,
            blink_rate: 0.04,
            occlusion_rate: 0.2,
        }
    }
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    // splitmix64 finalizer over a simple combination
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn identity_name(index: usize) -> String {
    format!("id{index:02}")
}

pub fn identity_texture(seed: u64, identity: usize, style: &SessionStyle) -> IrisTexture {
    IrisTexture::random(mix(seed, identity as u64, 0), style.texture_waves, style.max_angular_cycles)
}

/// Parameters of one frame of one identity.
pub fn frame_params(seed: u64, identity: usize, frame: usize, style: &SessionStyle) -> EyeParams {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, identity as u64, frame as u64 + 1));
    let iris_radius = 60.0 + rng.gen_range(-2.0..2.0);
    let roll = style.max_rotation_samples * 2.0 * PI / 512.0;
    let eyelid = if rng.gen_bool(style.occlusion_rate) {
        rng.gen_range(0.35..0.75)
    } else {
        rng.gen_range(0.0..0.18)
    };
    EyeParams {
        width: style.width,
        height: style.height,
        center: (
            style.width as f64 / 2.0 + rng.gen_range(-1.0..=1.0) * style.center_jitter,
            style.height as f64 / 2.0 + rng.gen_range(-1.0..=1.0) * style.center_jitter,
        ),
        pupil_radius: rng.gen_range(18.0..30.0),
        iris_radius,
        rotation: if roll > 0.0 { rng.gen_range(-roll..=roll) } else { 0.0 },
        eyelid,
        noise_sigma: style.noise_sigma,
        closed: rng.gen_bool(style.blink_rate),
    }
}

/// Render one frame of one identity.
pub fn capture(seed: u64, identity: usize, frame: usize, style: &SessionStyle) -> EyeCapture {
    let texture = identity_texture(seed, identity, style);
    let params = frame_params(seed, identity, frame, style);
    let (img, labels) = render(&texture, &params, mix(seed, identity as u64, !(frame as u64)));
    EyeCapture::new(identity_name(identity), frame as u64, img, labels).expect("rendered sizes agree")
}

/// Write `identities` x `frames` captures in the dataset layout.
pub fn write_dataset(root: &Path, identities: usize, frames: usize, seed: u64, style: &SessionStyle) -> Result<()> {
    for id in 0..identities {
        let name = identity_name(id);
        std::fs::create_dir_all(root.join("images").join(&name))?;
        std::fs::create_dir_all(root.join("labels").join(&name))?;
        for f in 0..frames {
            let cap = capture(seed, id, f, style);
            let stem = format!("{f:04}");
            cap.image.save(dataset::image_path(root, &name, &stem))?;
            cap.labels.to_image().save(dataset::label_path(root, &name, &stem))?;
        }
    }
    Ok(())
}
