//! Recurrence quantification analysis (RQA) for scalar time series.
//!
//! The pipeline runs in the order of the modules below:
//!
//! 1. [`embedding`] normalizes a series, reconstructs its phase space and
//!    estimates delay (average mutual information) and dimension (false
//!    nearest neighbours).
//! 2. [`recurrence`] builds the bit-packed recurrence plot.
//! 3. [`measures`] extracts diagonal/vertical line structures and computes
//!    RR, DET, L, L_max, DIV, ENTR, TREND, LAM, TT, T1 and T2.
//! 4. [`windowed`] slides a window along the line of identity.
//! 5. [`monitor`] reproduces a causal, day-by-day laminarity monitor.
//! 6. [`segmentation`] turns a laminarity curve into dated regime periods.
//!
//! File formats (CSV, PGM raster, SVG chart) live in [`io`].

pub mod embedding;
pub mod error;
pub mod io;
pub mod measures;
pub mod monitor;
pub mod recurrence;
pub mod segmentation;
#[cfg(feature = "fixtures")]
pub mod synth;
pub mod windowed;

pub use embedding::{
    average_mutual_information, delay_embed, false_nearest_neighbors, first_minimum, normalize,
    EmbeddedSeries, EmbeddingConfig, TimeSeries,
};
pub use error::{Error, Result};
pub use measures::{
    compute_measures, extract_diagonals, extract_verticals, LineHistogram, LineKind, Measure,
    MeasureSet,
};
pub use monitor::{monitor_point, monitor_series, MonitorConfig, NormalizationScope};
pub use recurrence::{build_rp, state_distance, Norm, RecurrencePlot};
pub use segmentation::{segment_lam, Period, PeriodKind, SegmentParams, SegmentReport};
pub use windowed::{windowed_measures, windowed_selected, MeasurePoint, MeasureSeries};
