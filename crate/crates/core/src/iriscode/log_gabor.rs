//! 1-D log-Gabor phase quantization along the angular direction.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{BitVec, EncoderKind, IrisCode};
use crate::error::{Error, Result};
use crate::normalize::{IrisMask, NormalizedIris, NormalizedSize};

const MIN_ANGULAR: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogGaborParams {
    pub radial_bands: usize,
    /// Centre wavelength in pixels along the angular axis.
    pub center_wavelength: f64,
    /// Bandwidth ratio sigma / f0.
    pub sigma_over_f: f64,
    /// Responses weaker than this fraction of the largest possible response
    /// are masked out.
    pub magnitude_floor: f64,
}

impl Default for LogGaborParams {
    fn default() -> Self {
        Self {
            radial_bands: 16,
            center_wavelength: 18.0,
            sigma_over_f: 0.5,
            magnitude_floor: 1e-4,
        }
    }
}

impl LogGaborParams {
    pub(crate) fn validate(&self, size: NormalizedSize) -> Result<()> {
        if self.radial_bands == 0 || self.radial_bands > size.radial {
            return Err(Error::ParamMismatch(format!(
                "{} radial bands for {} radial rows",
                self.radial_bands, size.radial
            )));
        }
        if size.angular < MIN_ANGULAR {
            return Err(Error::ParamMismatch(format!(
                "angular size {} below {MIN_ANGULAR}",
                size.angular
            )));
        }
        if !(self.center_wavelength > 0.0) || !(self.sigma_over_f > 0.0 && self.sigma_over_f < 1.0) {
            return Err(Error::ParamMismatch("log-Gabor wavelength/bandwidth out of range".into()));
        }
        Ok(())
    }

    /// One-sided frequency response: bins `0..=n/2` carry the log-Gabor
    /// gain, the negative half and DC are zero.
    pub fn frequency_response(&self, n: usize) -> Vec<f64> {
        let f0 = 1.0 / self.center_wavelength;
        let denom = 2.0 * self.sigma_over_f.ln().powi(2);
        (0..n)
            .map(|k| {
                if k == 0 || k > n / 2 {
                    0.0
                } else {
                    let f = k as f64 / n as f64;
                    (-(f / f0).ln().powi(2) / denom).exp()
                }
            })
            .collect()
    }
}

/// Complex log-Gabor response of a circular signal.
pub fn log_gabor_response(signal: &[f64], params: &LogGaborParams) -> Vec<Complex64> {
    let n = signal.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let gain = params.frequency_response(n);
    let mut buf: Vec<Complex64> = signal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    for (b, g) in buf.iter_mut().zip(&gain) {
        *b *= g / n as f64;
    }
    inv.process(&mut buf);
    buf
}

/// Upper bound on |response| for 8-bit input: 255 times the L1 norm of the
/// spatial kernel.
fn max_response(n: usize, params: &LogGaborParams) -> f64 {
    let mut impulse = vec![0.0; n];
    impulse[0] = 1.0;
    let kernel = log_gabor_response(&impulse, params);
    255.0 * kernel.iter().map(|c| c.norm()).sum::<f64>()
}

/// Band-average the texture, filter each band along angle and quantize the
/// phase of every sample to two bits `(imag > 0, real > 0)`.
///
/// A band cell with any invalid pixel is replaced by the mean of the band's
/// valid cells before filtering and is masked in the output.
pub fn encode_log_gabor(iris: &NormalizedIris, mask: &IrisMask, params: &LogGaborParams) -> Result<IrisCode> {
    super::check_dims(iris, mask)?;
    let size = NormalizedSize {
        angular: iris.angular(),
        radial: iris.radial(),
    };
    params.validate(size)?;
    let n = size.angular;
    let bands = params.radial_bands;
    let floor = params.magnitude_floor * max_response(n, params);

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let gain = params.frequency_response(n);

    let len = n * bands * 2;
    let mut code = BitVec::zeros(len);
    let mut valid = BitVec::zeros(len);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut cell_ok = vec![false; n];

    for b in 0..bands {
        let r0 = b * size.radial / bands;
        let r1 = (b + 1) * size.radial / bands;
        let mut sum_valid = 0.0;
        let mut n_valid = 0usize;
        for a in 0..n {
            let ok = (r0..r1).all(|r| mask.get(a, r));
            cell_ok[a] = ok;
            if ok {
                let v = (r0..r1).map(|r| iris.get(a, r) as f64).sum::<f64>() / (r1 - r0) as f64;
                buf[a] = Complex64::new(v, 0.0);
                sum_valid += v;
                n_valid += 1;
            }
        }
        let fill = if n_valid > 0 { sum_valid / n_valid as f64 } else { 0.0 };
        for a in 0..n {
            if !cell_ok[a] {
                buf[a] = Complex64::new(fill, 0.0);
            }
        }
        fwd.process(&mut buf);
        for (v, g) in buf.iter_mut().zip(&gain) {
            *v *= g / n as f64;
        }
        inv.process(&mut buf);

        let row = b * n * 2;
        for a in 0..n {
            let z = buf[a];
            let i = row + 2 * a;
            code.set(i, z.im > 0.0);
            code.set(i + 1, z.re > 0.0);
            if cell_ok[a] && z.norm() > floor {
                valid.set(i, true);
                valid.set(i + 1, true);
            }
        }
    }
    IrisCode::new(EncoderKind::LogGabor, code, valid, 2 * n)
}
