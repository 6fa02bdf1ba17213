//! Continuous-authentication trust value driven by per-frame comparisons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::FRAME_PERIOD_MS;

pub const TV_MIN: f64 = -1.0;
pub const TV_MAX: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrustConfig {
    /// Operating threshold `T` on similarity scores, usually the EER threshold.
    #[serde(rename = "T", alias = "threshold")]
    pub threshold: f64,
    /// Penalty for a frame that fails the quality gate.
    pub alpha: f64,
    pub imr_threshold: f64,
    pub lockout_enabled: bool,
    /// Trust level that triggers lockout; `T` when unset.
    pub lockout_threshold: Option<f64>,
}

impl Default for TrustConfig {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            alpha: 0.01,
            imr_threshold: 0.0,
            lockout_enabled: false,
            lockout_threshold: None,
        }
    }
}

impl TrustConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::ParamMismatch(format!("T = {} outside [0, 1]", self.threshold)));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::ParamMismatch(format!("alpha = {} must be positive", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.imr_threshold) {
            return Err(Error::ParamMismatch(format!(
                "IMR threshold {} outside [0, 1]",
                self.imr_threshold
            )));
        }
        if let Some(l) = self.lockout_threshold {
            if !(TV_MIN..=TV_MAX).contains(&l) {
                return Err(Error::ParamMismatch(format!("lockout threshold {l} outside [-1, 1]")));
            }
        }
        Ok(())
    }

    pub fn lockout_level(&self) -> f64 {
        self.lockout_threshold.unwrap_or(self.threshold)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrustState {
    pub tv: f64,
    pub locked_out: bool,
    pub update_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Event {
    /// The frame failed the IMR gate.
    LowQuality,
    /// Similarity of the frame against the session reference.
    Score(f64),
}

pub fn init_trust(config: &TrustConfig) -> TrustState {
    TrustState {
        tv: config.threshold,
        locked_out: false,
        update_count: 0,
    }
}

/// Apply one frame. A locked-out state is returned unchanged.
pub fn update_trust(state: TrustState, event: Event, config: &TrustConfig) -> Result<TrustState> {
    if state.locked_out {
        return Ok(state);
    }
    let t = config.threshold;
    let tv = match event {
        Event::LowQuality => (state.tv - config.alpha).max(TV_MIN),
        Event::Score(cs) => {
            if !(0.0..=1.0).contains(&cs) {
                return Err(Error::InvalidScore(cs));
            }
            if cs >= t {
                (state.tv + (cs - t)).min(TV_MAX)
            } else {
                (state.tv - (t - cs)).max(TV_MIN)
            }
        }
    };
    Ok(TrustState {
        tv,
        locked_out: config.lockout_enabled && tv < config.lockout_level(),
        update_count: state.update_count + 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    Genuine,
    Impostor,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub imr: f64,
    /// Required when `imr` passes the gate.
    pub cs: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub identity_id: String,
    pub scenario: Scenario,
    /// Percent of updates with `tv < T`.
    pub pct_below_threshold: f64,
    /// Percent of updates with `tv > T`.
    pub pct_above_threshold: f64,
    /// Trust value after each applied update.
    pub trajectory: Vec<f64>,
    pub final_state: TrustState,
    /// Frames consumed up to and including the one that locked the session.
    pub time_to_lockout: Option<usize>,
}

impl SessionReport {
    pub fn time_to_lockout_ms(&self) -> Option<f64> {
        self.time_to_lockout.map(|f| f as f64 * FRAME_PERIOD_MS)
    }
}

pub fn frame_event(index: usize, frame: &Frame, config: &TrustConfig) -> Result<Event> {
    if frame.imr < config.imr_threshold {
        return Ok(Event::LowQuality);
    }
    frame.cs.map(Event::Score).ok_or(Error::MissingScore(index))
}

/// Fold `update_trust` over the frames.
pub fn run_session(
    identity_id: &str,
    scenario: Scenario,
    frames: &[Frame],
    config: &TrustConfig,
) -> Result<SessionReport> {
    config.validate()?;
    let mut state = init_trust(config);
    let mut trajectory = Vec::with_capacity(frames.len());
    let mut time_to_lockout = None;
    for (i, f) in frames.iter().enumerate() {
        if state.locked_out {
            break;
        }
        state = update_trust(state, frame_event(i, f, config)?, config)?;
        trajectory.push(state.tv);
        if state.locked_out {
            time_to_lockout = Some(i + 1);
        }
    }
    let n = trajectory.len();
    let pct = |count: usize| if n == 0 { 0.0 } else { 100.0 * count as f64 / n as f64 };
    let t = config.threshold;
    Ok(SessionReport {
        identity_id: identity_id.to_string(),
        scenario,
        pct_below_threshold: pct(trajectory.iter().filter(|&&v| v < t).count()),
        pct_above_threshold: pct(trajectory.iter().filter(|&&v| v > t).count()),
        trajectory,
        final_state: state,
        time_to_lockout,
    })
}
