use std::path::PathBuf;

use crate::segmentation::SegmentReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("series has zero variance")]
    DegenerateSeries,

    #[error("series too short: need at least {needed} points, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("state vectors differ in dimension ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("window size {ws} exceeds plot size {n}")]
    WindowTooLarge { ws: usize, n: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    /// Segmentation found no crisis; the report carries the periods found so far.
    #[error("no crisis detected")]
    NoCrisisDetected(Box<SegmentReport>),

    #[error("{path}: line {row}: {reason}")]
    Parse {
        path: PathBuf,
        row: u64,
        reason: String,
    },

    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the input data rather than by the caller's arguments.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::InvalidConfig(_) | Error::WindowTooLarge { .. })
    }
}
