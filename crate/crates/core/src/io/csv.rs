use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;

use crate::embedding::{EmbeddingConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::windowed::{MeasurePoint, MeasureSeries};

fn parse_error(path: &Path, row: u64, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        row,
        reason: reason.into(),
    }
}

fn column_index(headers: &::csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: name.to_string(),
        })
}

fn reader(path: &Path) -> Result<::csv::Reader<fs::File>> {
    ::csv::ReaderBuilder::new()
        .trim(::csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            ::csv::ErrorKind::Io(io) => Error::io(path, io),
            other => parse_error(path, 1, format!("{other:?}")),
        })
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

/// Reads a `date` column (ISO-8601) and the value column `column`.
///
/// Rows must be in strictly increasing date order. Error rows are reported by
/// file line number, the header being line 1.
pub fn load_csv(path: impl AsRef<Path>, column: &str) -> Result<TimeSeries> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    let date_col = column_index(&headers, "date", path)?;
    let value_col = column_index(&headers, column, path)?;

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let raw_date = record.get(date_col).unwrap_or("");
        let date = parse_date(raw_date)
            .ok_or_else(|| parse_error(path, line, format!("invalid date `{raw_date}`")))?;
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(parse_error(
                    path,
                    line,
                    format!("date {date} does not follow {prev}"),
                ));
            }
        }
        let raw_value = record.get(value_col).unwrap_or("");
        if raw_value.is_empty() {
            return Err(parse_error(path, line, format!("missing `{column}` value")));
        }
        let value: f64 = raw_value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| parse_error(path, line, format!("invalid number `{raw_value}`")))?;
        dates.push(date);
        values.push(value);
    }
    log::debug!(
        "read {} rows of `{column}` from {}",
        values.len(),
        path.display()
    );
    TimeSeries::new(dates, values)
}

/// Writes `series` side by side as `date,index,<measure>...` with LF line endings.
///
/// Undefined values become empty fields. All series must share one index grid.
pub fn write_measures_csv(series: &[MeasureSeries], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = measures_csv(series)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn measures_csv(series: &[MeasureSeries]) -> Result<String> {
    let Some(first) = series.first() else {
        return Err(Error::InvalidConfig("no measure series to write".into()));
    };
    let grid = first.indices();
    if series.iter().any(|s| s.indices() != grid) {
        return Err(Error::InvalidConfig(
            "measure series do not share an index grid".into(),
        ));
    }
    let mut out = String::from("date,index");
    for s in series {
        out.push(',');
        out.push_str(s.measure.name());
    }
    out.push('\n');
    for (row, index) in grid.iter().enumerate() {
        let date = series.iter().find_map(|s| s.points[row].date);
        if let Some(d) = date {
            write!(out, "{}", d.format("%Y-%m-%d")).unwrap();
        }
        write!(out, ",{index}").unwrap();
        for s in series {
            out.push(',');
            if let Some(v) = s.points[row].value {
                write!(out, "{v}").unwrap();
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Reads a file produced by [`write_measures_csv`].
///
/// Window size and embedding are not stored in the file; the returned series
/// carry `ws = 0` and the default embedding.
pub fn read_measures_csv(path: impl AsRef<Path>) -> Result<Vec<MeasureSeries>> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    let date_col = column_index(&headers, "date", path)?;
    let index_col = column_index(&headers, "index", path)?;
    let columns: Vec<(usize, Measure)> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != date_col && i != index_col)
        .map(|(i, h)| {
            h.parse::<Measure>()
                .map(|m| (i, m))
                .map_err(|_| parse_error(path, 1, format!("unknown measure column `{h}`")))
        })
        .collect::<Result<_>>()?;

    let mut out: Vec<MeasureSeries> = columns
        .iter()
        .map(|&(_, measure)| MeasureSeries {
            measure,
            points: Vec::new(),
            ws: 0,
            step: 1,
            embedding: EmbeddingConfig::default(),
        })
        .collect();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let raw_date = record.get(date_col).unwrap_or("");
        let date = if raw_date.is_empty() {
            None
        } else {
            Some(
                parse_date(raw_date)
                    .ok_or_else(|| parse_error(path, line, format!("invalid date `{raw_date}`")))?,
            )
        };
        let raw_index = record.get(index_col).unwrap_or("");
        let index: usize = raw_index
            .parse()
            .map_err(|_| parse_error(path, line, format!("invalid index `{raw_index}`")))?;
        for (series, &(col, _)) in out.iter_mut().zip(&columns) {
            let raw = record.get(col).unwrap_or("");
            let value = if raw.is_empty() {
                None
            } else {
                Some(
                    raw.parse::<f64>()
                        .map_err(|_| parse_error(path, line, format!("invalid number `{raw}`")))?,
                )
            };
            series.points.push(MeasurePoint { index, date, value });
        }
    }
    Ok(out)
}
