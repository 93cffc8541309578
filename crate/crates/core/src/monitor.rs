//! Causal laminarity monitor.
//!
//! For every day `t` the trailing `lpr` observations are normalized on their
//! own, embedded, and only the final `ws x ws` window of their recurrence
//! plot is evaluated. Each point therefore uses data up to `t` only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{delay_embed, normalize, EmbeddingConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::measures::{block_values, compute_measures, Block, Measure, MeasureSet};
use crate::recurrence::{build_rp_with, RecurrencePlot};
use crate::windowed::{MeasurePoint, MeasureSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationScope {
    /// Each trailing subseries is normalized on its own.
    #[default]
    Subseries,
    /// The whole input is normalized once. Not causal; used to compare the
    /// monitor against the regular windowed analysis.
    Global,
    /// Raw values.
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonitorConfig {
    /// Length of the trailing subseries analysed each day.
    pub lpr: usize,
    pub ws: usize,
    pub embedding: EmbeddingConfig,
    pub measures: Vec<Measure>,
    pub scope: NormalizationScope,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self {
            lpr: 1500,
            ws: 250,
            embedding: EmbeddingConfig::default(),
            measures: vec![Measure::Lam],
            scope: NormalizationScope::Subseries,
        }
    }
}

impl MonitorConfig {
    pub fn validate(&self) -> Result<()> {
        self.embedding.validate()?;
        if self.ws == 0 {
            return Err(Error::InvalidConfig(
                "window size must be at least 1".into(),
            ));
        }
        if self.ws > self.lpr {
            return Err(Error::InvalidConfig(format!(
                "window size {} exceeds lpr {}",
                self.ws, self.lpr
            )));
        }
        let states = self
            .lpr
            .checked_sub((self.embedding.m - 1) * self.embedding.tau);
        if states.is_none_or(|s| s < self.ws) {
            return Err(Error::InvalidConfig(format!(
                "lpr {} leaves fewer than ws = {} states after embedding",
                self.lpr, self.ws
            )));
        }
        if self.measures.is_empty() {
            return Err(Error::InvalidConfig("no measures selected".into()));
        }
        Ok(())
    }

    fn check_series(&self, series: &TimeSeries) -> Result<()> {
        self.validate()?;
        if series.len() < self.lpr {
            return Err(Error::SeriesTooShort {
                needed: self.lpr,
                got: series.len(),
            });
        }
        Ok(())
    }
}

/// Recurrence plot of the last `ws` states of `window`, whose first sample sits
/// at series index `start`.
fn final_window(window: &[f64], start: usize, cfg: &MonitorConfig) -> Result<RecurrencePlot> {
    let emb = &cfg.embedding;
    let embedded = delay_embed(window, emb.m, emb.tau)?.with_source_start(start);
    let states = embedded.len();
    build_rp_with(&embedded.slice(states - cfg.ws..states), emb)
}

fn scoped<'a>(values: &'a [f64], scope: NormalizationScope) -> Result<std::borrow::Cow<'a, [f64]>> {
    Ok(match scope {
        NormalizationScope::Subseries => normalize(values)?.into(),
        NormalizationScope::Global | NormalizationScope::Off => values.into(),
    })
}

/// All measures of the monitor at day `t`.
pub fn monitor_point(series: &TimeSeries, t: usize, cfg: &MonitorConfig) -> Result<MeasureSet> {
    cfg.check_series(series)?;
    if t + 1 < cfg.lpr || t >= series.len() {
        return Err(Error::InvalidConfig(format!(
            "t = {t} outside {}..{}",
            cfg.lpr - 1,
            series.len()
        )));
    }
    let start = t + 1 - cfg.lpr;
    let global;
    let source = if cfg.scope == NormalizationScope::Global {
        global = normalize(series.values())?;
        &global[..]
    } else {
        series.values()
    };
    let window = scoped(&source[start..=t], cfg.scope)?;
    let rp = final_window(&window, start, cfg)?;
    Ok(compute_measures(&rp, &cfg.embedding))
}

/// Runs the monitor for every `t` in `lpr - 1 .. len`.
///
/// Days whose trailing subseries is constant yield `None` values.
pub fn monitor_series(series: &TimeSeries, cfg: &MonitorConfig) -> Result<Vec<MeasureSeries>> {
    cfg.check_series(series)?;
    let global;
    let source = if cfg.scope == NormalizationScope::Global {
        global = normalize(series.values())?;
        &global[..]
    } else {
        series.values()
    };

    let rows: Vec<Option<Vec<Option<f64>>>> = (cfg.lpr - 1..series.len())
        .into_par_iter()
        .map(|t| {
            let start = t + 1 - cfg.lpr;
            let window = match scoped(&source[start..=t], cfg.scope) {
                Ok(w) => w,
                Err(Error::DegenerateSeries) => return Ok(None),
                Err(e) => return Err(e),
            };
            let rp = final_window(&window, start, cfg)?;
            Ok(Some(block_values(
                &Block::new(&rp, 0, cfg.ws),
                &cfg.embedding,
                t,
                &cfg.measures,
            )))
        })
        .collect::<Result<_>>()?;

    let skipped = rows.iter().filter(|r| r.is_none()).count();
    if skipped > 0 {
        log::warn!("{skipped} days with a constant trailing subseries left undefined");
    }
    let dates = series.dates();
    Ok(cfg
        .measures
        .iter()
        .enumerate()
        .map(|(k, &measure)| MeasureSeries {
            measure,
            points: rows
                .iter()
                .enumerate()
                .map(|(r, values)| {
                    let index = cfg.lpr - 1 + r;
                    MeasurePoint {
                        index,
                        date: Some(dates[index]),
                        value: values.as_ref().and_then(|v| v[k]),
                    }
                })
                .collect(),
            ws: cfg.ws,
            step: 1,
            embedding: cfg.embedding,
        })
        .collect())
}
