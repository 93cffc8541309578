//! Bit-packed recurrence plots.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{delay_embed, EmbeddedSeries, EmbeddingConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    /// Largest coordinate-wise absolute difference.
    #[default]
    Maximum,
    Euclidean,
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "maximum" | "max" => Ok(Norm::Maximum),
            "euclidean" => Ok(Norm::Euclidean),
            other => Err(Error::InvalidConfig(format!("unknown norm `{other}`"))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Maximum => "maximum",
            Norm::Euclidean => "euclidean",
        })
    }
}

pub fn state_distance(a: &[f64], b: &[f64], norm: Norm) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(distance(a, b, norm))
}

#[inline]
fn distance(a: &[f64], b: &[f64], norm: Norm) -> f64 {
    match norm {
        Norm::Maximum => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
        Norm::Euclidean => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
    }
}

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Square binary matrix `R[i][j] = (||x_i - x_j|| <= epsilon)`, stored as
/// bit-packed rows (bit `j % 64` of word `j / 64`).
#[derive(Clone, PartialEq)]
pub struct RecurrencePlot {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    config: EmbeddingConfig,
    source_range: Range<usize>,
    /// Series index of plot row 0.
    first_index: usize,
}

impl fmt::Debug for RecurrencePlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecurrencePlot")
            .field("n", &self.n)
            .field("recurrences", &self.count_ones())
            .field("config", &self.config)
            .field("source_range", &self.source_range)
            .finish()
    }
}

/// Builds the recurrence plot of `embedded` with a fixed global threshold.
///
/// The returned plot records `m` and `tau` from the embedding; line-length
/// settings take their defaults.
pub fn build_rp(embedded: &EmbeddedSeries, epsilon: f64, norm: Norm) -> Result<RecurrencePlot> {
    let config = EmbeddingConfig {
        m: embedded.dim(),
        tau: embedded.tau(),
        epsilon,
        norm,
        ..Default::default()
    };
    build_rp_with(embedded, &config)
}

/// Like [`build_rp`] but records the full configuration in the plot.
pub fn build_rp_with(
    embedded: &EmbeddedSeries,
    config: &EmbeddingConfig,
) -> Result<RecurrencePlot> {
    if !(config.epsilon >= 0.0 && config.epsilon.is_finite()) {
        return Err(Error::InvalidConfig("epsilon must be non-negative".into()));
    }
    if embedded.is_empty() {
        return Err(Error::SeriesTooShort { needed: 1, got: 0 });
    }
    let n = embedded.len();
    let wpr = words_for(n);
    let mut bits = vec![0u64; n * wpr];
    let eps = config.epsilon;
    let norm = config.norm;

    if embedded.dim() == 1 {
        let xs: Vec<f64> = embedded.points().map(|p| p[0]).collect();
        bits.par_chunks_mut(wpr).enumerate().for_each(|(i, row)| {
            let xi = xs[i];
            for (w, word) in row.iter_mut().enumerate() {
                let base = w * WORD;
                let end = (base + WORD).min(n);
                let mut acc = 0u64;
                for (b, &xj) in xs[base..end].iter().enumerate() {
                    acc |= (((xi - xj).abs() <= eps) as u64) << b;
                }
                *word = acc;
            }
        });
    } else {
        bits.par_chunks_mut(wpr).enumerate().for_each(|(i, row)| {
            let xi = embedded.point(i);
            for j in 0..n {
                if distance(xi, embedded.point(j), norm) <= eps {
                    row[j / WORD] |= 1 << (j % WORD);
                }
            }
        });
    }

    Ok(RecurrencePlot {
        n,
        words_per_row: wpr,
        bits,
        config: EmbeddingConfig {
            m: embedded.dim(),
            tau: embedded.tau(),
            ..*config
        },
        source_range: embedded.source_range(),
        first_index: embedded.source_index(0),
    })
}

impl RecurrencePlot {
    /// Embeds `series` (already normalized, or deliberately raw) and builds its plot.
    pub fn from_series(series: &[f64], config: &EmbeddingConfig) -> Result<Self> {
        let embedded = delay_embed(series, config.m, config.tau)?;
        build_rp_with(&embedded, config)
    }

    /// Builds an arbitrary `n x n` binary matrix; no symmetry or LOI is enforced.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let wpr = words_for(n);
        let mut bits = vec![0u64; n * wpr];
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    bits[i * wpr + j / WORD] |= 1 << (j % WORD);
                }
            }
        }
        Self {
            n,
            words_per_row: wpr,
            bits,
            config: EmbeddingConfig::default(),
            source_range: 0..n,
            first_index: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &EmbeddingConfig {
        &self.config
    }

    pub fn source_range(&self) -> Range<usize> {
        self.source_range.clone()
    }

    /// Series index associated with plot row `i` (the newest sample of state `i`).
    pub fn source_index(&self, i: usize) -> usize {
        self.first_index + i
    }

    /// Moves the plot so that row 0 maps to series index `first_index`.
    pub fn with_first_index(mut self, first_index: usize) -> Self {
        let shift = first_index as isize - self.first_index as isize;
        let start = (self.source_range.start as isize + shift).max(0) as usize;
        self.source_range = start..start + self.source_range.len();
        self.first_index = first_index;
        self
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of bounds");
        (self.bits[i * self.words_per_row + j / WORD] >> (j % WORD)) & 1 == 1
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::from_fn(self.n, |i, j| self.get(j, i));
        t.config = self.config;
        t.source_range = self.source_range.clone();
        t.first_index = self.first_index;
        t
    }

    /// Row-major dense copy, mostly for bindings and debugging.
    pub fn to_rows(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// The `len x len` submatrix starting at `(start, start)` on the line of identity.
    pub fn window(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > self.n {
            return Err(Error::WindowTooLarge {
                ws: start + len,
                n: self.n,
            });
        }
        let wpr = words_for(len);
        let bits = self.aligned_rows(start, len);
        let first_index = self.first_index + start;
        let span = (self.config.m - 1) * self.config.tau;
        Ok(Self {
            n: len,
            words_per_row: wpr,
            bits,
            config: self.config,
            source_range: first_index - span.min(first_index)..first_index + len,
            first_index,
        })
    }

    /// Rows `start..start + len`, restricted to the same column range and
    /// re-aligned so that column `start` becomes bit 0. Padding bits are zero.
    pub(crate) fn aligned_rows(&self, start: usize, len: usize) -> Vec<u64> {
        let out_words = words_for(len);
        let mut out = vec![0u64; len * out_words];
        let tail_bits = len % WORD;
        let tail_mask = if tail_bits == 0 {
            !0
        } else {
            (1u64 << tail_bits) - 1
        };
        let shift = start % WORD;
        let first_word = start / WORD;
        for r in 0..len {
            let src = self.row_words(start + r);
            let dst = &mut out[r * out_words..(r + 1) * out_words];
            for (k, d) in dst.iter_mut().enumerate() {
                let w = first_word + k;
                let lo = src.get(w).copied().unwrap_or(0) >> shift;
                let hi = if shift == 0 {
                    0
                } else {
                    src.get(w + 1).copied().unwrap_or(0) << (WORD - shift)
                };
                *d = lo | hi;
            }
            if let Some(last) = dst.last_mut() {
                *last &= tail_mask;
            }
        }
        out
    }
}
