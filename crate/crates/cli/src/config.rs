use std::fmt;
use std::path::{Path, PathBuf};

use iris_hmd::{DistanceKind, EncoderKind, EncoderParams, MatchConfig, NormalizedSize, TrustConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One matcher configuration: an encoder paired with a distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Setting {
    pub encoder: EncoderKind,
    pub distance: DistanceKind,
}

impl Setting {
    pub fn new(encoder: EncoderKind, distance: DistanceKind) -> Self {
        Self { encoder, distance }
    }

    /// File-name stem for a setting at an IMR threshold, e.g. `LG-SHD-imr0.70`.
    pub fn stem(&self, imr_threshold: f64) -> String {
        format!("{self}-imr{imr_threshold:.2}")
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.encoder, self.distance)
    }
}

/// The five evaluated combinations: both distances for LG and DCT, HD only
/// for CSBCA.
pub fn default_settings() -> Vec<Setting> {
    use DistanceKind::*;
    use EncoderKind::*;
    vec![
        Setting::new(LogGabor, Hd),
        Setting::new(LogGabor, Shd),
        Setting::new(Dct, Hd),
        Setting::new(Dct, Shd),
        Setting::new(Csbca, Hd),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset_root: PathBuf,
    pub output_dir: PathBuf,
    pub encoders: Vec<EncoderKind>,
    pub distance_kinds: Vec<DistanceKind>,
    /// Explicit (encoder, distance) pairs. When absent, every encoder is
    /// paired with every distance kind.
    pub settings: Option<Vec<Setting>>,
    pub imr_thresholds: Vec<f64>,
    pub n_ref: usize,
    pub n_skip: usize,
    pub normalized_dims: NormalizedSize,
    pub encoder_params: EncoderParams,
    pub matcher: MatchConfig,
    /// `T` is replaced by the EER threshold of the chosen setting.
    pub trust: TrustConfig,
    pub trust_setting: Setting,
    pub write_trajectories: bool,
    pub bench_iterations: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset_root: PathBuf::from("data"),
            output_dir: PathBuf::from("out"),
            encoders: EncoderKind::ALL.to_vec(),
            distance_kinds: vec![DistanceKind::Hd, DistanceKind::Shd],
            settings: Some(default_settings()),
            imr_thresholds: vec![0.0, 0.7],
            n_ref: 10,
            n_skip: 5,
            normalized_dims: NormalizedSize::default(),
            encoder_params: EncoderParams::default(),
            matcher: MatchConfig::default(),
            trust: TrustConfig::default(),
            trust_setting: Setting::new(EncoderKind::LogGabor, DistanceKind::Shd),
            write_trajectories: false,
            bench_iterations: 1000,
            seed: 0,
        }
    }
}

/// Command-line values that override keys of the JSON config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub dataset: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub imr_thresholds: Option<Vec<f64>>,
    pub encoders: Option<Vec<EncoderKind>>,
    pub distances: Option<Vec<DistanceKind>>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(d) = o.dataset {
            self.dataset_root = d;
        }
        if let Some(d) = o.out {
            self.output_dir = d;
        }
        if let Some(t) = o.imr_thresholds {
            self.imr_thresholds = t;
        }
        let narrowed = o.encoders.is_some() || o.distances.is_some();
        if let Some(e) = o.encoders {
            self.encoders = e;
        }
        if let Some(d) = o.distances {
            self.distance_kinds = d;
        }
        if narrowed {
            self.settings = None;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
    }

    /// Settings to evaluate, in a fixed order.
    pub fn settings(&self) -> Vec<Setting> {
        match &self.settings {
            Some(s) => s.clone(),
            None => self
                .encoders
                .iter()
                .flat_map(|&e| self.distance_kinds.iter().map(move |&d| Setting::new(e, d)))
                .collect(),
        }
    }

    pub fn encoders_needed(&self) -> Vec<EncoderKind> {
        let mut e: Vec<EncoderKind> = self.settings().iter().map(|s| s.encoder).collect();
        e.sort();
        e.dedup();
        e
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let settings = self.settings();
        if settings.is_empty() {
            return Err(CliError::Config("at least one encoder and one distance kind are required".into()));
        }
        let mut seen = settings.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != settings.len() {
            return Err(CliError::Config("duplicate setting".into()));
        }
        if self.imr_thresholds.is_empty() {
            return Err(CliError::Config("no IMR thresholds".into()));
        }
        if let Some(t) = self.imr_thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(CliError::Config(format!("IMR threshold {t} outside [0, 1]")));
        }
        if self.n_ref == 0 {
            return Err(CliError::Config("n_ref must be positive".into()));
        }
        if self.bench_iterations == 0 {
            return Err(CliError::Config("bench_iterations must be positive".into()));
        }
        for kind in self.encoders_needed() {
            self.encoder_params
                .code_len(kind, self.normalized_dims)
                .map_err(|e| CliError::Config(format!("{kind}: {e}")))?;
        }
        let mut trust = self.trust.clone();
        // T is filled in from the verification scores; only the rest is checked here.
        trust.threshold = 0.5;
        trust.imr_threshold = 0.0;
        trust.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}
