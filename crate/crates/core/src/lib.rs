//! Iris recognition on low-resolution head-mounted-display eye captures:
//! label clean-up, rubber-sheet normalization, three binary encoders,
//! masked Hamming matching, verification metrics and a continuous-trust
//! session simulator.

pub mod dataset;
pub mod error;
pub mod geometry;
pub mod iriscode;
pub mod labels;
pub mod matcher;
pub mod metrics;
pub mod normalize;
pub mod protocol;
pub mod region;
pub mod synth;
pub mod trust;

pub use error::{Error, Result};
pub use geometry::{coarse_crop, fit_eye_geometry, iris_box, CoarseBox, EyeGeometry};
pub use iriscode::{encode, EncoderKind, EncoderParams, IrisCode};
pub use labels::{load_capture, refine_labels, Class, EyeCapture, LabelMap};
pub use matcher::{compare, hamming, shifted_hamming, to_similarity, ComparisonScore, DistanceKind, MatchConfig};
pub use normalize::{compute_imr, unroll, IrisMask, NormalizedIris, NormalizedSize, QualityScore};
pub use metrics::{evaluate, Metrics, MetricsReport, RocPoint, ScoreSet};
pub use protocol::{filter_probes, select_reference, split_session, GapHistogram, IdentitySession, ProtocolSplit, SessionCapture};
pub use trust::{init_trust, run_session, update_trust, Event, Frame, Scenario, SessionReport, TrustConfig, TrustState};
