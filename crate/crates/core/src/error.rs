use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileMissing(PathBuf),

    #[error("image is {image_width}x{image_height} but labels are {label_width}x{label_height}")]
    DimensionMismatch {
        image_width: u32,
        image_height: u32,
        label_width: u32,
        label_height: u32,
    },

    #[error("illegal label value {value} at ({x}, {y})")]
    IllegalLabelValue { x: u32, y: u32, value: u8 },

    #[error("no pupil pixels in label map")]
    NoPupil,

    #[error("no iris pixels in label map")]
    NoIris,

    #[error("degenerate geometry: iris radius {iris_radius} <= pupil radius {pupil_radius}")]
    DegenerateGeometry { pupil_radius: f64, iris_radius: f64 },

    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    #[error("encoder mismatch: {0} vs {1}")]
    EncoderMismatch(&'static str, &'static str),

    #[error("code length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("joint mask has {overlap} valid bits, need at least {required}")]
    InsufficientOverlap { overlap: usize, required: usize },

    #[error("session has {len} captures, need more than {required}")]
    SessionTooShort { len: usize, required: usize },

    #[error("reference pool is empty")]
    EmptyPool,

    #[error("score set is empty")]
    EmptyScores,

    #[error("no threshold reaches the requested false match rate")]
    NoQualifyingThreshold,

    #[error("comparison score {0} outside [0, 1]")]
    InvalidScore(f64),

    #[error("frame {0} passed the quality gate but carries no comparison score")]
    MissingScore(usize),

    #[error("malformed template: {0}")]
    BadTemplate(String),

    #[error("dataset not found: {0}")]
    DatasetNotFound(PathBuf),

    #[error("malformed dataset: {0}")]
    BadDataset(String),

    #[error("prepared data missing: {0}")]
    MissingPreparedData(PathBuf),

    #[error("score dump missing: {0}")]
    MissingScores(PathBuf),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short tag used in metadata tables.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::FileMissing(_) => "FileMissing",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::IllegalLabelValue { .. } => "IllegalLabelValue",
            Error::NoPupil => "NoPupil",
            Error::NoIris => "NoIris",
            Error::DegenerateGeometry { .. } => "DegenerateGeometry",
            Error::ParamMismatch(_) => "ParamMismatch",
            Error::EncoderMismatch(..) => "EncoderMismatch",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::InsufficientOverlap { .. } => "InsufficientOverlap",
            Error::SessionTooShort { .. } => "SessionTooShort",
            Error::EmptyPool => "EmptyPool",
            Error::EmptyScores => "EmptyScores",
            Error::NoQualifyingThreshold => "NoQualifyingThreshold",
            Error::InvalidScore(_) => "InvalidScore",
            Error::MissingScore(_) => "MissingScore",
            Error::BadTemplate(_) => "BadTemplate",
            Error::DatasetNotFound(_) => "DatasetNotFound",
            Error::BadDataset(_) => "BadDataset",
            Error::MissingPreparedData(_) => "MissingPreparedData",
            Error::MissingScores(_) => "MissingScores",
            Error::Image(_) => "ImageError",
            Error::Io(_) => "IoError",
        }
    }
}
