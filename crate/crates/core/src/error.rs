use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HoloError>;

#[derive(Debug, Error)]
pub enum HoloError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sample count {actual} does not match grid {nx}x{ny}")]
    SampleCount { nx: usize, ny: usize, actual: usize },

    #[error("non-finite sample at index {index} (x={x}, y={y})")]
    NonFinite { index: usize, x: usize, y: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hologram mismatch: {0}")]
    HologramMismatch(String),

    #[error("aliased configuration: {0}")]
    Aliased(String),

    #[error("filter window overlaps DC: radius {radius} bins, +1 order at {distance} bins")]
    WindowOverlapsDc { radius: usize, distance: usize },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("grid file parse error at byte {offset}: {reason}")]
    GridFormat { offset: u64, reason: String },

    #[error("scene parse error at line {line}: {reason}")]
    SceneFormat { line: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<HoloError>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image export failed: {0}")]
    Image(#[from] image::ImageError),
}

impl HoloError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HoloError::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        HoloError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
