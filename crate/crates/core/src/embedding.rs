//! Normalization, delay embedding and embedding-parameter estimation.

use std::ops::Range;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::Norm;

/// Daily observations of one asset.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if values.len() < 2 {
            return Err(Error::SeriesTooShort {
                needed: 2,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value at index {i}"
            )));
        }
        if let Some(i) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSeries(format!(
                "dates not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { dates, values })
    }

    /// Builds a series on consecutive calendar days starting at `start`.
    pub fn with_daily_dates(start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        let dates = (0..values.len())
            .map(|i| {
                start
                    .checked_add_days(Days::new(i as u64))
                    .ok_or_else(|| Error::InvalidSeries("date overflow".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dates, values)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `len` observations.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        let len = len.min(self.len());
        Self::new(self.dates[..len].to_vec(), self.values[..len].to_vec())
    }
}

/// Embedding and line-detection parameters shared by every stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingConfig {
    /// Embedding dimension.
    pub m: usize,
    /// Delay in samples.
    pub tau: usize,
    /// Recurrence threshold in units of the normalized series.
    pub epsilon: f64,
    pub norm: Norm,
    /// Minimal diagonal line length.
    pub l_min: usize,
    /// Minimal vertical line length.
    pub v_min: usize,
    /// Diagonals with `|i - j| < theiler` are excluded from diagonal measures.
    pub theiler: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            m: 1,
            tau: 1,
            epsilon: 0.1,
            norm: Norm::Maximum,
            l_min: 2,
            v_min: 2,
            theiler: 1,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if self.tau < 1 {
            return Err(Error::InvalidConfig("tau must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        if self.l_min < 2 {
            return Err(Error::InvalidConfig("l_min must be at least 2".into()));
        }
        if self.v_min < 2 {
            return Err(Error::InvalidConfig("v_min must be at least 2".into()));
        }
        Ok(())
    }

    /// Number of state vectors produced from a series of length `n`, if at least two.
    pub fn embedded_len(&self, n: usize) -> Option<usize> {
        let span = (self.m - 1) * self.tau;
        n.checked_sub(span).filter(|&len| len >= 2)
    }
}

/// Delay-embedded state vectors stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSeries {
    coords: Vec<f64>,
    dim: usize,
    tau: usize,
    source_range: Range<usize>,
}

impl EmbeddedSeries {
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Range of series indices the embedding was built from.
    pub fn source_range(&self) -> Range<usize> {
        self.source_range.clone()
    }

    /// Series index of the newest sample that state `i` depends on.
    pub fn source_index(&self, i: usize) -> usize {
        self.source_range.start + i + (self.dim - 1) * self.tau
    }

    /// Relocates the embedding so that its first sample sits at series index `start`.
    pub fn with_source_start(mut self, start: usize) -> Self {
        let len = self.source_range.len();
        self.source_range = start..start + len;
        self
    }

    /// Keeps only the states in `range`, adjusting the source range accordingly.
    pub fn slice(&self, range: Range<usize>) -> Self {
        let span = (self.dim - 1) * self.tau;
        let start = self.source_range.start + range.start;
        Self {
            coords: self.coords[range.start * self.dim..range.end * self.dim].to_vec(),
            dim: self.dim,
            tau: self.tau,
            source_range: start..start + range.len() + span,
        }
    }
}

/// Z-score with the sample (N - 1) standard deviation.
pub fn normalize(series: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: series.len(),
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries("non-finite value".into()));
    }
    if series.iter().all(|&v| v == series[0]) {
        return Err(Error::DegenerateSeries);
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return Err(Error::DegenerateSeries);
    }
    Ok(series.iter().map(|v| (v - mean) / sd).collect())
}

/// Time-delay reconstruction: state `i` is `(s[i], s[i + tau], ..., s[i + (m - 1) tau])`.
pub fn delay_embed(series: &[f64], m: usize, tau: usize) -> Result<EmbeddedSeries> {
    if m == 0 || tau == 0 {
        return Err(Error::InvalidConfig("m and tau must be at least 1".into()));
    }
    let span = (m - 1) * tau;
    let count = series.len().saturating_sub(span);
    if series.len() < span + 2 {
        return Err(Error::SeriesTooShort {
            needed: span + 2,
            got: series.len(),
        });
    }
    let mut coords = Vec::with_capacity(count * m);
    for i in 0..count {
        coords.extend((0..m).map(|k| series[i + k * tau]));
    }
    Ok(EmbeddedSeries {
        coords,
        dim: m,
        tau,
        source_range: 0..series.len(),
    })
}

fn bin_indices(series: &[f64], bins: usize) -> Result<Vec<usize>> {
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(hi > lo) {
        return Err(Error::DegenerateSeries);
    }
    let width = hi - lo;
    Ok(series
        .iter()
        .map(|&v| (((v - lo) / width * bins as f64) as usize).min(bins - 1))
        .collect())
}

/// Mutual information (nats) between `s[t]` and `s[t + lag]` for `lag = 0..=max_lag`.
///
/// Probabilities come from an equal-width `bins x bins` histogram spanning the
/// series range. The per-cell terms are summed in sorted order, which makes the
/// estimate exactly invariant under time reversal.
pub fn average_mutual_information(series: &[f64], max_lag: usize, bins: usize) -> Result<Vec<f64>> {
    if bins < 2 {
        return Err(Error::InvalidConfig("bins must be at least 2".into()));
    }
    if series.len() <= max_lag + 1 {
        return Err(Error::SeriesTooShort {
            needed: max_lag + 2,
            got: series.len(),
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries("non-finite value".into()));
    }
    let idx = bin_indices(series, bins)?;
    let mut joint = vec![0u64; bins * bins];
    let mut px = vec![0u64; bins];
    let mut py = vec![0u64; bins];
    let mut terms = Vec::with_capacity(bins * bins);

    let curve = (0..=max_lag)
        .map(|lag| {
            joint.iter_mut().for_each(|c| *c = 0);
            px.iter_mut().for_each(|c| *c = 0);
            py.iter_mut().for_each(|c| *c = 0);
            let pairs = series.len() - lag;
            for t in 0..pairs {
                let (a, b) = (idx[t], idx[t + lag]);
                joint[a * bins + b] += 1;
                px[a] += 1;
                py[b] += 1;
            }
            let n = pairs as f64;
            terms.clear();
            for a in 0..bins {
                for b in 0..bins {
                    let c = joint[a * bins + b];
                    if c > 0 {
                        let c = c as f64;
                        terms.push(c * ((c * n) / (px[a] as f64 * py[b] as f64)).ln());
                    }
                }
            }
            terms.sort_by(f64::total_cmp);
            terms.iter().sum::<f64>() / n
        })
        .collect();
    Ok(curve)
}

/// First index `i` with `curve[i - 1] > curve[i] <= curve[i + 1]`.
///
/// On a plateau this is the first index of the plateau.
pub fn first_minimum(curve: &[f64]) -> Option<usize> {
    if curve.len() < 3 {
        return None;
    }
    (1..curve.len() - 1).find(|&i| curve[i - 1] > curve[i] && curve[i] <= curve[i + 1])
}

/// Kennel's false-nearest-neighbour fractions for `m = 1..=max_m`.
///
/// Element `m - 1` is the share of states whose nearest neighbour in dimension
/// `m` (Euclidean) separates when the `(m + 1)`-th coordinate is added: either
/// the added distance exceeds `rtol` times the neighbour distance, or the
/// `(m + 1)`-dimensional distance exceeds `atol` times the series standard deviation.
///
/// An added distance below `1e-9` standard deviations is rounding noise and
/// never fails the ratio test, so exact recurrences (periodic signals) count
/// as true neighbours.
pub fn false_nearest_neighbors(
    series: &[f64],
    tau: usize,
    max_m: usize,
    rtol: f64,
    atol: f64,
) -> Result<Vec<f64>> {
    if tau == 0 || max_m == 0 {
        return Err(Error::InvalidConfig(
            "tau and max_m must be at least 1".into(),
        ));
    }
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(Error::InvalidConfig(
            "rtol and atol must be positive".into(),
        ));
    }
    let needed = max_m * tau + 2;
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: series.len(),
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries("non-finite value".into()));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let sd = (series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let rtol2 = rtol * rtol;
    let atol2 = (atol * sd).powi(2);
    let floor2 = (FNN_NOISE_FLOOR * sd).powi(2);

    let fractions = (1..=max_m)
        .map(|m| {
            let count = series.len() - m * tau;
            let neighbours = nearest_neighbours(series, m, tau, count);
            let false_count = neighbours
                .iter()
                .enumerate()
                .filter(|&(i, &(j, d2))| {
                    let extra = series[i + m * tau] - series[j + m * tau];
                    let extra2 = extra * extra;
                    (extra2 > floor2 && extra2 > rtol2 * d2) || d2 + extra2 > atol2
                })
                .count();
            false_count as f64 / count as f64
        })
        .collect();
    Ok(fractions)
}

const FNN_NOISE_FLOOR: f64 = 1e-9;

/// Nearest neighbour (index, squared distance) of each of the first `count`
/// `m`-dimensional delay vectors. Ties resolve to the smallest index.
fn nearest_neighbours(series: &[f64], m: usize, tau: usize, count: usize) -> Vec<(usize, f64)> {
    let dist2 = |i: usize, j: usize| -> f64 {
        (0..m)
            .map(|k| {
                let d = series[i + k * tau] - series[j + k * tau];
                d * d
            })
            .sum()
    };
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| series[a].total_cmp(&series[b]).then(a.cmp(&b)));

    let mut out = vec![(0, f64::INFINITY); count];
    for (pos, &i) in order.iter().enumerate() {
        let mut best = (usize::MAX, f64::INFINITY);
        // Walk outwards in first-coordinate order; the first-coordinate gap
        // bounds the full distance from below.
        let mut lo = pos;
        let mut hi = pos + 1;
        loop {
            let left_gap = (lo > 0).then(|| {
                let d = series[i] - series[order[lo - 1]];
                d * d
            });
            let right_gap = (hi < count).then(|| {
                let d = series[order[hi]] - series[i];
                d * d
            });
            let (gap, go_left) = match (left_gap, right_gap) {
                (Some(l), Some(r)) => (l.min(r), l <= r),
                (Some(l), None) => (l, true),
                (None, Some(r)) => (r, false),
                (None, None) => break,
            };
            if gap > best.1 {
                break;
            }
            let j = if go_left {
                lo -= 1;
                order[lo]
            } else {
                hi += 1;
                order[hi - 1]
            };
            let d2 = dist2(i, j);
            if d2 < best.1 || (d2 == best.1 && j < best.0) {
                best = (j, d2);
            }
        }
        out[i] = best;
    }
    out
}
