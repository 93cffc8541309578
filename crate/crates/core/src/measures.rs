//! Line structures and the RQA measure suite.
//!
//! Diagonal statistics ignore the band `|i - j| < theiler` around the line of
//! identity. Recurrence rate and all vertical statistics use the full matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingConfig;
use crate::error::Error;
use crate::recurrence::{words_for, RecurrencePlot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Rr,
    Det,
    L,
    Lmax,
    Div,
    Entr,
    Trend,
    Lam,
    Tt,
    T1,
    T2,
}

impl Measure {
    /// Output column order.
    pub const ALL: [Measure; 11] = [
        Measure::Rr,
        Measure::Det,
        Measure::L,
        Measure::Lmax,
        Measure::Div,
        Measure::Entr,
        Measure::Trend,
        Measure::Lam,
        Measure::Tt,
        Measure::T1,
        Measure::T2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Rr => "rr",
            Measure::Det => "det",
            Measure::L => "l",
            Measure::Lmax => "lmax",
            Measure::Div => "div",
            Measure::Entr => "entr",
            Measure::Trend => "trend",
            Measure::Lam => "lam",
            Measure::Tt => "tt",
            Measure::T1 => "t1",
            Measure::T2 => "t2",
        }
    }

    /// Measures that need nothing beyond vertical run totals.
    fn is_vertical_only(self) -> bool {
        matches!(self, Measure::Rr | Measure::Lam | Measure::Tt)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim().to_ascii_lowercase();
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown measure `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Diagonal,
    Vertical,
}

/// Histogram of maximal line lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineHistogram {
    pub kind: LineKind,
    /// Line length -> number of lines of exactly that length.
    pub counts: BTreeMap<usize, u64>,
    /// Recurrence points in scope: outside the Theiler band for diagonals,
    /// the whole matrix for verticals.
    pub total_recurrence_points: u64,
}

impl LineHistogram {
    fn new(kind: LineKind) -> Self {
        Self {
            kind,
            counts: BTreeMap::new(),
            total_recurrence_points: 0,
        }
    }

    fn push(&mut self, len: usize) {
        *self.counts.entry(len).or_insert(0) += 1;
    }

    /// `(points, lines)` over lines of length `>= min_len`.
    pub fn totals_from(&self, min_len: usize) -> (u64, u64) {
        self.counts
            .range(min_len..)
            .fold((0, 0), |(p, l), (&len, &c)| (p + len as u64 * c, l + c))
    }

    /// Longest line of length `>= min_len`, or 0.
    pub fn max_length_from(&self, min_len: usize) -> usize {
        self.counts
            .range(min_len..)
            .next_back()
            .map_or(0, |(&len, _)| len)
    }

    /// Shannon entropy (nats) of the length distribution restricted to `>= min_len`.
    pub fn entropy_from(&self, min_len: usize) -> f64 {
        let (_, lines) = self.totals_from(min_len);
        if lines == 0 {
            return 0.0;
        }
        let total = lines as f64;
        self.counts.range(min_len..).fold(0.0, |acc, (_, &c)| {
            let p = c as f64 / total;
            acc + -(p * p.ln())
        })
    }
}

/// One value per RQA measure for one plot or window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    pub rr: f64,
    pub det: f64,
    pub l_mean: Option<f64>,
    pub l_max: usize,
    pub div: Option<f64>,
    /// Nats.
    pub entr: f64,
    /// Slope of the per-diagonal recurrence rate against the diagonal offset.
    pub trend: Option<f64>,
    pub lam: f64,
    pub tt: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    /// Series index of the last state in the window.
    pub window_end: usize,
}

impl MeasureSet {
    pub fn get(&self, measure: Measure) -> Option<f64> {
        match measure {
            Measure::Rr => Some(self.rr),
            Measure::Det => Some(self.det),
            Measure::L => self.l_mean,
            Measure::Lmax => Some(self.l_max as f64),
            Measure::Div => self.div,
            Measure::Entr => Some(self.entr),
            Measure::Trend => self.trend,
            Measure::Lam => Some(self.lam),
            Measure::Tt => self.tt,
            Measure::T1 => self.t1,
            Measure::T2 => self.t2,
        }
    }
}

/// A square block of a plot with its rows re-aligned to bit 0.
pub(crate) struct Block {
    n: usize,
    wpr: usize,
    rows: Vec<u64>,
}

impl Block {
    pub(crate) fn new(rp: &RecurrencePlot, start: usize, len: usize) -> Self {
        Self {
            n: len,
            wpr: words_for(len),
            rows: rp.aligned_rows(start, len),
        }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.wpr..(i + 1) * self.wpr]
    }

    fn ones(&self) -> u64 {
        self.rows.iter().map(|w| w.count_ones() as u64).sum()
    }
}

struct Scan {
    diagonal: LineHistogram,
    vertical: LineHistogram,
    /// Recurrences per diagonal offset `|i - j|`, both triangles.
    offset_counts: Vec<u64>,
    t1: Option<f64>,
    t2: Option<f64>,
}

const NONE: usize = usize::MAX;

/// Single row-major pass over the set bits, tracking open runs per diagonal and per column.
fn scan(block: &Block, theiler: usize) -> Scan {
    let n = block.n;
    let mut diagonal = LineHistogram::new(LineKind::Diagonal);
    let mut vertical = LineHistogram::new(LineKind::Vertical);
    let mut offset_counts = vec![0u64; n];

    // Diagonal d = j + n - 1 - i.
    let mut d_last = vec![NONE; 2 * n];
    let mut d_run = vec![0usize; 2 * n];

    let mut v_last = vec![NONE; n];
    let mut v_run = vec![0usize; n];
    let mut v_first = vec![NONE; n];
    let mut v_count = vec![0u64; n];
    let mut s_first = vec![NONE; n];
    let mut s_last = vec![NONE; n];
    let mut s_count = vec![0u64; n];

    for i in 0..n {
        for (w, &word) in block.row(i).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let j = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;

                let offset = i.abs_diff(j);
                offset_counts[offset] += 1;
                if offset >= theiler {
                    diagonal.total_recurrence_points += 1;
                    let d = j + n - 1 - i;
                    if d_run[d] > 0 && d_last[d] + 1 == i {
                        d_run[d] += 1;
                    } else {
                        if d_run[d] > 0 {
                            diagonal.push(d_run[d]);
                        }
                        d_run[d] = 1;
                    }
                    d_last[d] = i;
                }

                vertical.total_recurrence_points += 1;
                if v_run[j] > 0 && v_last[j] + 1 == i {
                    v_run[j] += 1;
                } else {
                    if v_run[j] > 0 {
                        vertical.push(v_run[j]);
                    }
                    v_run[j] = 1;
                    if s_first[j] == NONE {
                        s_first[j] = i;
                    }
                    s_last[j] = i;
                    s_count[j] += 1;
                }
                v_last[j] = i;
                if v_first[j] == NONE {
                    v_first[j] = i;
                }
                v_count[j] += 1;
            }
        }
    }
    for &len in d_run.iter().filter(|&&l| l > 0) {
        diagonal.push(len);
    }
    for &len in v_run.iter().filter(|&&l| l > 0) {
        vertical.push(len);
    }

    let mean_gap = |first: &[usize], last: &[usize], count: &[u64]| -> Option<f64> {
        let (sum, cols) = (0..n)
            .filter(|&j| count[j] >= 2)
            .fold((0.0, 0u64), |(s, c), j| {
                (
                    s + (last[j] - first[j]) as f64 / (count[j] - 1) as f64,
                    c + 1,
                )
            });
        (cols > 0).then(|| sum / cols as f64)
    };
    let t1 = mean_gap(&v_first, &v_last, &v_count);
    let t2 = mean_gap(&s_first, &s_last, &s_count);

    Scan {
        diagonal,
        vertical,
        offset_counts,
        t1,
        t2,
    }
}

/// Least-squares slope of `RR_k` against `k` over offsets outside the Theiler
/// band and below 90% of the plot size.
fn trend(offset_counts: &[u64], n: usize, theiler: usize) -> Option<f64> {
    let lo = theiler.max(1);
    let hi = (9 * n / 10).min(n.saturating_sub(1));
    if hi < lo + 1 {
        return None;
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .map(|k| (k as f64, offset_counts[k] as f64 / (2 * (n - k)) as f64))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub(crate) fn block_measures(
    block: &Block,
    cfg: &EmbeddingConfig,
    window_end: usize,
) -> MeasureSet {
    let n = block.n;
    let scan = scan(block, cfg.theiler);
    let (d_pts, d_lines) = scan.diagonal.totals_from(cfg.l_min);
    let l_max = scan.diagonal.max_length_from(cfg.l_min);
    let (v_pts, v_lines) = scan.vertical.totals_from(cfg.v_min);
    MeasureSet {
        rr: ratio(scan.vertical.total_recurrence_points, (n * n) as u64),
        det: ratio(d_pts, scan.diagonal.total_recurrence_points),
        l_mean: (d_lines > 0).then(|| d_pts as f64 / d_lines as f64),
        l_max,
        div: (l_max > 0).then(|| 1.0 / l_max as f64),
        entr: scan.diagonal.entropy_from(cfg.l_min),
        trend: trend(&scan.offset_counts, n, cfg.theiler),
        lam: ratio(v_pts, scan.vertical.total_recurrence_points),
        tt: (v_lines > 0).then(|| v_pts as f64 / v_lines as f64),
        t1: scan.t1,
        t2: scan.t2,
        window_end,
    }
}

/// `(points on vertical lines >= v_min, number of such lines)`, 64 columns at a time.
///
/// A cell lies on a maximal vertical run of length `>= v` exactly when some
/// `v` consecutive rows containing it are all set in its column.
fn vertical_totals(block: &Block, v_min: usize) -> (u64, u64) {
    let (n, wpr) = (block.n, block.wpr);
    if n < v_min {
        return (0, 0);
    }
    let mut points = 0u64;
    let mut lines = 0u64;
    // full[i]: columns where rows i..i + v_min are all set.
    let mut full = vec![0u64; n];
    for w in 0..wpr {
        let word = |i: usize| block.rows[i * wpr + w];
        for (i, f) in full.iter_mut().enumerate() {
            *f = if i + v_min <= n {
                (i..i + v_min).fold(!0u64, |acc, r| acc & word(r))
            } else {
                0
            };
        }
        for i in 0..n {
            let above = if i == 0 { 0 } else { word(i - 1) };
            lines += (full[i] & !above).count_ones() as u64;
            let covered = (i.saturating_sub(v_min - 1)..=i).fold(0u64, |acc, s| acc | full[s]);
            points += covered.count_ones() as u64;
        }
    }
    (points, lines)
}

/// Values of `selected`, skipping the full line scan when only RR, LAM and TT are asked for.
pub(crate) fn block_values(
    block: &Block,
    cfg: &EmbeddingConfig,
    window_end: usize,
    selected: &[Measure],
) -> Vec<Option<f64>> {
    if selected.iter().all(|m| m.is_vertical_only()) {
        let total = block.ones();
        let (v_pts, v_lines) = vertical_totals(block, cfg.v_min);
        selected
            .iter()
            .map(|m| match m {
                Measure::Rr => Some(ratio(total, (block.n * block.n) as u64)),
                Measure::Lam => Some(ratio(v_pts, total)),
                Measure::Tt => (v_lines > 0).then(|| v_pts as f64 / v_lines as f64),
                _ => unreachable!(),
            })
            .collect()
    } else {
        let set = block_measures(block, cfg, window_end);
        selected.iter().map(|&m| set.get(m)).collect()
    }
}

/// Histogram of maximal diagonal runs with `|i - j| >= theiler`, both triangles.
pub fn extract_diagonals(rp: &RecurrencePlot, theiler: usize) -> LineHistogram {
    scan(&Block::new(rp, 0, rp.n()), theiler).diagonal
}

/// Histogram of maximal vertical runs over the full matrix.
pub fn extract_verticals(rp: &RecurrencePlot) -> LineHistogram {
    scan(&Block::new(rp, 0, rp.n()), 0).vertical
}

/// All measures of `rp` using the line settings in `cfg`.
pub fn compute_measures(rp: &RecurrencePlot, cfg: &EmbeddingConfig) -> MeasureSet {
    let n = rp.n();
    let end = if n == 0 {
        rp.source_index(0)
    } else {
        rp.source_index(n - 1)
    };
    block_measures(&Block::new(rp, 0, n), cfg, end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&str]) -> RecurrencePlot {
        let m: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.chars().map(|c| c == '1').collect())
            .collect();
        RecurrencePlot::from_fn(m.len(), |i, j| m[i][j])
    }

    fn fixture() -> RecurrencePlot {
        from_rows(&["11011", "11011", "00100", "11011", "11011"])
    }

    fn hist(pairs: &[(usize, u64)]) -> BTreeMap<usize, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn fixture_diagonals() {
        let h = extract_diagonals(&fixture(), 1);
        // Offset 3 carries the length-2 lines; offsets 1, 2 and 4 single points.
        assert_eq!(h.counts, hist(&[(1, 8), (2, 2)]));
        assert_eq!(h.total_recurrence_points, 12);
        assert_eq!(h.totals_from(2), (4, 2));
    }

    #[test]
    fn fixture_verticals() {
        let h = extract_verticals(&fixture());
        assert_eq!(h.counts, hist(&[(1, 1), (2, 8)]));
        assert_eq!(h.total_recurrence_points, 17);
    }

    #[test]
    fn fixture_measures() {
        let m = compute_measures(&fixture(), &EmbeddingConfig::default());
        assert_eq!(m.rr, 17.0 / 25.0);
        assert_eq!(m.det, 4.0 / 12.0);
        assert_eq!(m.l_mean, Some(2.0));
        assert_eq!(m.l_max, 2);
        assert_eq!(m.div, Some(0.5));
        assert_eq!(m.entr, 0.0);
        assert_eq!(m.lam, 16.0 / 17.0);
        assert_eq!(m.tt, Some(2.0));
        assert_eq!(m.window_end, 4);
    }

    #[test]
    fn identity_plot() {
        let rp = RecurrencePlot::from_fn(6, |i, j| i == j);
        let d = extract_diagonals(&rp, 1);
        assert!(d.counts.is_empty());
        assert_eq!(d.total_recurrence_points, 0);
        assert_eq!(extract_verticals(&rp).counts, hist(&[(1, 6)]));
        let m = compute_measures(&rp, &EmbeddingConfig::default());
        assert_eq!(m.rr, 1.0 / 6.0);
        assert_eq!((m.det, m.lam), (0.0, 0.0));
        assert_eq!((m.div, m.tt, m.l_mean), (None, None, None));
        assert_eq!(m.t1, None);
    }

    #[test]
    fn all_ones_geometry() {
        let rp = RecurrencePlot::from_fn(4, |_, _| true);
        let d = extract_diagonals(&rp, 0);
        assert_eq!(d.counts, hist(&[(1, 2), (2, 2), (3, 2), (4, 1)]));
        assert_eq!(extract_verticals(&rp).counts, hist(&[(4, 4)]));

        let m = compute_measures(&rp, &EmbeddingConfig::default());
        assert_eq!(m.rr, 1.0);
        assert_eq!(m.lam, 1.0);
        assert_eq!(m.tt, Some(4.0));
        assert_eq!(m.t1, Some(1.0));
        assert_eq!(m.t2, None);
        assert_eq!(m.trend, Some(0.0));
    }

    #[test]
    fn t2_counts_run_starts() {
        // Column 0: rows 0,1 then 4,5 -> starts 0 and 4.
        let rp = from_rows(&[
            "1000001", "1000000", "0000000", "0000000", "1000000", "1000000", "1000000",
        ]);
        let m = compute_measures(&rp, &EmbeddingConfig::default());
        assert_eq!(m.t2, Some(4.0));
        // Column 0 gaps 1,3,1,1 -> 6/4; column 6 single point.
        assert_eq!(m.t1, Some(1.5));
    }

    #[test]
    fn entropy_of_two_classes() {
        let mut h = LineHistogram::new(LineKind::Diagonal);
        h.push(2);
        h.push(3);
        assert!((h.entropy_from(2) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(h.entropy_from(3), 0.0);
        assert!(h.entropy_from(3).is_sign_positive());
    }

    #[test]
    fn fast_vertical_path_matches_scan() {
        let rp = RecurrencePlot::from_fn(130, |i, j| (i * 7 + j * 7) % 5 < 2 || (i / 3 == j / 3));
        for v_min in [2, 3, 5] {
            let cfg = EmbeddingConfig {
                v_min,
                ..Default::default()
            };
            let block = Block::new(&rp, 0, 130);
            let full = block_measures(&block, &cfg, 0);
            let fast = block_values(&block, &cfg, 0, &[Measure::Rr, Measure::Lam, Measure::Tt]);
            assert_eq!(fast, vec![Some(full.rr), Some(full.lam), full.tt]);
        }
    }

    #[test]
    fn measure_names_round_trip() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert!("foo".parse::<Measure>().is_err());
    }
}
