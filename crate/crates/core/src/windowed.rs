//! Sliding-window RQA along the line of identity.

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::measures::{block_values, Block, Measure};
use crate::recurrence::RecurrencePlot;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurePoint {
    /// Series index of the window end.
    pub index: usize,
    pub date: Option<NaiveDate>,
    pub value: Option<f64>,
}

/// One measure evaluated on a sequence of windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSeries {
    pub measure: Measure,
    pub points: Vec<MeasurePoint>,
    pub ws: usize,
    pub step: usize,
    pub embedding: EmbeddingConfig,
}

impl MeasureSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.index).collect()
    }

    pub fn values(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Attaches the calendar date of each point's index.
    pub fn with_dates(mut self, series: &TimeSeries) -> Self {
        for p in &mut self.points {
            p.date = series.dates().get(p.index).copied();
        }
        self
    }
}

/// Number of windows of size `ws` advanced by `step` over a plot of size `n`.
pub fn window_count(n: usize, ws: usize, step: usize) -> usize {
    if ws == 0 || step == 0 || ws > n {
        0
    } else {
        (n - ws) / step + 1
    }
}

/// Every measure on every `ws x ws` window; see [`windowed_selected`].
pub fn windowed_measures(
    rp: &RecurrencePlot,
    cfg: &EmbeddingConfig,
    ws: usize,
    step: usize,
) -> Result<Vec<MeasureSeries>> {
    windowed_selected(rp, cfg, ws, step, &Measure::ALL)
}

/// Evaluates `measures` on the windows `[k, k + ws)` for `k = 0, step, 2 step, ...`.
///
/// Each value is stamped with the series index of the window's last state, so
/// no point depends on data after its index.
pub fn windowed_selected(
    rp: &RecurrencePlot,
    cfg: &EmbeddingConfig,
    ws: usize,
    step: usize,
    measures: &[Measure],
) -> Result<Vec<MeasureSeries>> {
    if ws == 0 {
        return Err(Error::InvalidConfig(
            "window size must be at least 1".into(),
        ));
    }
    if step == 0 {
        return Err(Error::InvalidConfig("step must be at least 1".into()));
    }
    if ws > rp.n() {
        return Err(Error::WindowTooLarge { ws, n: rp.n() });
    }
    let count = window_count(rp.n(), ws, step);
    let rows: Vec<(usize, Vec<Option<f64>>)> = (0..count)
        .into_par_iter()
        .map(|w| {
            let start = w * step;
            let end = rp.source_index(start + ws - 1);
            let block = Block::new(rp, start, ws);
            (end, block_values(&block, cfg, end, measures))
        })
        .collect();

    Ok(measures
        .iter()
        .enumerate()
        .map(|(k, &measure)| MeasureSeries {
            measure,
            points: rows
                .iter()
                .map(|(index, values)| MeasurePoint {
                    index: *index,
                    date: None,
                    value: values[k],
                })
                .collect(),
            ws,
            step,
            embedding: *cfg,
        })
        .collect())
}
