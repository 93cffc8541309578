//! File formats: price CSV input, measure CSV output, PGM rasters and SVG charts.

mod chart;
mod csv;
mod raster;

pub use self::chart::{export_chart, render_chart};
pub use self::csv::{load_csv, read_measures_csv, write_measures_csv};
pub use self::raster::{export_rp_raster, rp_raster};
