//! Regime periods and crisis statistics from a laminarity curve.
//!
//! Detection runs on a centered moving average; the reported LAM statistics
//! are read from the raw curve.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::windowed::MeasureSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentParams {
    /// Moving-average width (odd).
    pub width: usize,
    /// Depth of the normal band below the smoothed maximum.
    pub band: f64,
    /// Drop below the band that marks instability, also the rebound that ends a decline.
    pub instability_drop: f64,
    /// Peak-to-point decline that marks a crisis.
    pub crisis_drop: f64,
}

impl Default for SegmentParams {
    fn default() -> Self {
        Self {
            width: 11,
            band: 0.02,
            instability_drop: 0.02,
            crisis_drop: 0.05,
        }
    }
}

impl SegmentParams {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.width.is_multiple_of(2) {
            return Err(Error::InvalidConfig("smoothing width must be odd".into()));
        }
        if !(self.band >= 0.0 && self.band.is_finite()) {
            return Err(Error::InvalidConfig("band must be non-negative".into()));
        }
        if !(self.instability_drop > 0.0 && self.crisis_drop > self.instability_drop) {
            return Err(Error::InvalidConfig(
                "require crisis_drop > instability_drop > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodKind {
    Normal,
    Instability,
    Crisis,
    Relaxation,
}

/// An inclusive span of the LAM series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub kind: PeriodKind,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub start_index: usize,
    pub end_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub periods: Vec<Period>,
    /// Raw LAM range over the normal period.
    #[serde(serialize_with = "precise::pair")]
    pub lam_normal_band: (f64, f64),
    #[serde(serialize_with = "precise::option")]
    pub lam_at_crisis_start: Option<f64>,
    #[serde(serialize_with = "precise::option")]
    pub lam_minimum: Option<f64>,
    #[serde(serialize_with = "precise::option")]
    pub lam_drop: Option<f64>,
    /// `lam_drop / lam_at_crisis_start`, as a fraction.
    #[serde(serialize_with = "precise::option")]
    pub lam_drop_pct: Option<f64>,
    /// Trading days from crisis start to the LAM minimum.
    pub crisis_time_days: Option<usize>,
}

impl SegmentReport {
    pub fn period(&self, kind: PeriodKind) -> Option<&Period> {
        self.periods.iter().find(|p| p.kind == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Writes reals as plain decimals with 15 significant digits.
mod precise {
    use std::str::FromStr;

    use serde::{Serialize, Serializer};

    pub(super) fn format(x: f64) -> String {
        if x == 0.0 || !x.is_finite() {
            return format!("{:.14}", if x.is_finite() { 0.0 } else { x });
        }
        let exponent = x.abs().log10().floor() as i32;
        let decimals = (14 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    }

    fn number(x: f64) -> serde_json::Number {
        serde_json::Number::from_str(&format(x)).expect("formatted real is a JSON number")
    }

    pub(super) fn option<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        x.map(number).serialize(s)
    }

    pub(super) fn pair<S: Serializer>(x: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
        (number(x.0), number(x.1)).serialize(s)
    }
}

fn moving_average(values: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Segments a LAM curve into normal, instability, crisis and relaxation periods.
///
/// * normal band: `[max(smoothed) - band, max(smoothed)]`; points before the
///   first entry into the band form a relaxation period;
/// * instability: first run of at least `width` smoothed points below the band
///   by `instability_drop` or more, if it starts before the crisis;
/// * crisis: starts at the peak of the first decline whose smoothed drop
///   reaches `crisis_drop`, and ends at the smoothed minimum of that decline.
///   A decline is broken by a rebound of `instability_drop` or by `width`
///   points without a new low;
/// * relaxation: everything after the minimum.
///
/// Undefined LAM points are skipped. When no crisis is found the partial report
/// is returned inside [`Error::NoCrisisDetected`].
pub fn segment_lam(lam: &MeasureSeries, params: &SegmentParams) -> Result<SegmentReport> {
    params.validate()?;
    let pts: Vec<_> = lam
        .points
        .iter()
        .filter_map(|p| p.value.map(|v| (p.index, p.date, v)))
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidSeries(
            "LAM series has no defined values".into(),
        ));
    }
    if pts.iter().any(|p| !p.2.is_finite()) {
        return Err(Error::InvalidSeries("non-finite LAM value".into()));
    }
    let raw: Vec<f64> = pts.iter().map(|p| p.2).collect();
    let smooth = moving_average(&raw, params.width);
    let len = raw.len();
    let last = len - 1;

    let top = smooth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let band_lo = top - params.band;
    let entry = smooth
        .iter()
        .position(|&s| s >= band_lo)
        .expect("maximum lies in the band");

    // Crisis onset: the peak of the first decline reaching crisis_drop. A
    // decline ends when the curve rebounds by instability_drop or makes no new
    // low for `width` points.
    let mut crisis = None;
    let (mut peak, mut low) = (entry, entry);
    for i in entry..len {
        if smooth[i] >= smooth[peak] {
            (peak, low) = (i, i);
        } else if smooth[i] < smooth[low] {
            low = i;
            if smooth[peak] - smooth[low] >= params.crisis_drop {
                crisis = Some((peak, i));
                break;
            }
        } else if smooth[i] - smooth[low] >= params.instability_drop || i - low >= params.width {
            (peak, low) = (i, i);
        }
    }
    let crisis = crisis.map(|(onset, detected)| {
        let mut trough = detected;
        for i in detected..len {
            if smooth[i] < smooth[trough] {
                trough = i;
            } else if smooth[i] - smooth[trough] >= params.instability_drop {
                break;
            }
        }
        (onset, trough)
    });

    let limit = crisis.map_or(len, |(onset, _)| onset);
    let sustained = params.width;
    let threshold = band_lo - params.instability_drop;
    let mut instability = None;
    let mut run = 0;
    for i in entry..limit {
        if smooth[i] <= threshold {
            run += 1;
            if run >= sustained {
                instability = Some(i + 1 - run);
                break;
            }
        } else {
            run = 0;
        }
    }

    let mut spans = Vec::new();
    if entry > 0 {
        spans.push((PeriodKind::Relaxation, 0, entry - 1));
    }
    let normal_end = instability.unwrap_or(limit).saturating_sub(1).min(last);
    // A crisis may start on the very first band point; the normal period is then empty.
    let has_normal = instability.unwrap_or(limit) > entry;
    if has_normal {
        spans.push((PeriodKind::Normal, entry, normal_end));
    }
    if let Some(start) = instability {
        let end = crisis.map_or(last, |(onset, _)| onset - 1);
        spans.push((PeriodKind::Instability, start, end));
    }
    if let Some((onset, trough)) = crisis {
        spans.push((PeriodKind::Crisis, onset, trough));
        if trough < last {
            spans.push((PeriodKind::Relaxation, trough + 1, last));
        }
    }
    let periods = spans
        .iter()
        .map(|&(kind, s, e)| Period {
            kind,
            start: pts[s].1,
            end: pts[e].1,
            start_index: pts[s].0,
            end_index: pts[e].0,
        })
        .collect();

    let normal_range = if has_normal {
        entry..=normal_end
    } else {
        entry..=entry
    };
    let normal_raw = &raw[normal_range];
    let lam_normal_band = (
        normal_raw.iter().copied().fold(f64::INFINITY, f64::min),
        normal_raw.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );

    let mut report = SegmentReport {
        periods,
        lam_normal_band,
        lam_at_crisis_start: None,
        lam_minimum: None,
        lam_drop: None,
        lam_drop_pct: None,
        crisis_time_days: None,
    };
    let Some((onset, trough)) = crisis else {
        return Err(Error::NoCrisisDetected(Box::new(report)));
    };
    let start_value = raw[onset];
    let minimum = raw[onset..=trough]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let drop = start_value - minimum;
    report.lam_at_crisis_start = Some(start_value);
    report.lam_minimum = Some(minimum);
    report.lam_drop = Some(drop);
    report.lam_drop_pct = Some(drop / start_value);
    report.crisis_time_days = Some(pts[trough].0 - pts[onset].0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbeddingConfig;
    use crate::measures::Measure;
    use crate::windowed::MeasurePoint;

    fn lam(values: &[f64]) -> MeasureSeries {
        MeasureSeries {
            measure: Measure::Lam,
            points: values
                .iter()
                .enumerate()
                .map(|(i, &v)| MeasurePoint {
                    index: i + 249,
                    date: None,
                    value: Some(v),
                })
                .collect(),
            ws: 250,
            step: 1,
            embedding: EmbeddingConfig::default(),
        }
    }

    /// 0.95 for 500 points, linear fall to 0.75 over 300, linear rise to 0.93 over 300.
    fn crisis_shape() -> Vec<f64> {
        let mut v = vec![0.95; 500];
        v.extend((1..=300).map(|k| 0.95 - 0.2 * k as f64 / 300.0));
        v.extend((1..=300).map(|k| 0.75 + 0.18 * k as f64 / 300.0));
        v
    }

    #[test]
    fn piecewise_fixture() {
        let params = SegmentParams {
            crisis_drop: 0.1,
            ..Default::default()
        };
        let r = segment_lam(&lam(&crisis_shape()), &params).unwrap();
        let crisis = r.period(PeriodKind::Crisis).unwrap();
        let onset = crisis.start_index - 249;
        let minimum = crisis.end_index - 249;
        assert!(onset.abs_diff(500) <= 11, "onset {onset}");
        assert!(minimum.abs_diff(800) <= 11, "minimum {minimum}");
        let pct = r.lam_drop_pct.unwrap();
        assert!((pct - 0.21).abs() <= 0.01, "pct {pct}");
        assert!(r.period(PeriodKind::Instability).is_none());
        let kinds: Vec<_> = r.periods.iter().map(|p| p.kind).collect();
        assert_eq!(
            kinds,
            [
                PeriodKind::Normal,
                PeriodKind::Crisis,
                PeriodKind::Relaxation
            ]
        );
        assert_eq!(
            r.crisis_time_days,
            Some(crisis.end_index - crisis.start_index)
        );
    }

    #[test]
    fn constant_series_has_no_crisis() {
        match segment_lam(&lam(&[0.9; 200]), &SegmentParams::default()) {
            Err(Error::NoCrisisDetected(report)) => {
                assert_eq!(report.periods.len(), 1);
                assert_eq!(report.periods[0].kind, PeriodKind::Normal);
                assert_eq!(report.lam_normal_band, (0.9, 0.9));
                assert!(report.lam_drop.is_none());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn instability_before_crisis() {
        // Normal 0.97, plateau 0.925 (instability), then deep fall and recovery.
        let mut v = vec![0.97; 300];
        v.extend(vec![0.925; 200]);
        v.extend((1..=100).map(|k| 0.925 - 0.15 * k as f64 / 100.0));
        v.extend((1..=100).map(|k| 0.775 + 0.1 * k as f64 / 100.0));
        let r = segment_lam(&lam(&v), &SegmentParams::default()).unwrap();
        let kinds: Vec<_> = r.periods.iter().map(|p| p.kind).collect();
        assert_eq!(
            kinds,
            [
                PeriodKind::Normal,
                PeriodKind::Instability,
                PeriodKind::Crisis,
                PeriodKind::Relaxation
            ]
        );
        let inst = r.period(PeriodKind::Instability).unwrap();
        assert!((inst.start_index - 249).abs_diff(300) <= 11);
        let crisis = r.period(PeriodKind::Crisis).unwrap();
        assert!((crisis.start_index - 249).abs_diff(500) <= 11);
    }

    #[test]
    fn leading_recovery_is_relaxation() {
        let mut v: Vec<f64> = (0..100).map(|k| 0.8 + 0.15 * k as f64 / 100.0).collect();
        v.extend(vec![0.95; 200]);
        let Err(Error::NoCrisisDetected(r)) = segment_lam(&lam(&v), &SegmentParams::default())
        else {
            panic!("expected no crisis");
        };
        assert_eq!(r.periods[0].kind, PeriodKind::Relaxation);
        assert_eq!(r.periods[1].kind, PeriodKind::Normal);
        assert_eq!(r.periods[0].end_index + 1, r.periods[1].start_index);
    }

    #[test]
    fn json_reals_have_twelve_digits() {
        let params = SegmentParams {
            crisis_drop: 0.1,
            ..Default::default()
        };
        let r = segment_lam(&lam(&crisis_shape()), &params).unwrap();
        let json = r.to_json();
        assert!(
            json.contains("\"lam_at_crisis_start\": 0.950000000000000"),
            "{json}"
        );
        let back: SegmentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.periods, r.periods);
        assert!((back.lam_drop.unwrap() - r.lam_drop.unwrap()).abs() < 1e-14);
    }

    #[test]
    fn precise_format() {
        assert_eq!(precise::format(0.95), "0.950000000000000");
        assert_eq!(precise::format(21.81), "21.8100000000000");
        assert_eq!(precise::format(0.0), "0.00000000000000");
        assert_eq!(precise::format(-0.0012345), "-0.00123450000000000");
    }

    #[test]
    fn rejects_bad_params() {
        let v = lam(&[0.9; 20]);
        for p in [
            SegmentParams {
                width: 4,
                ..Default::default()
            },
            SegmentParams {
                crisis_drop: 0.01,
                ..Default::default()
            },
            SegmentParams {
                instability_drop: 0.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(segment_lam(&v, &p), Err(Error::InvalidConfig(_))));
        }
    }
}
