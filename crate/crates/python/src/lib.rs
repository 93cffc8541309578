//! Python module `rqa`: embedding diagnostics, recurrence plots, RQA measures,
//! the rolling monitor and LAM segmentation.

use chrono::NaiveDate;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use rqa_core as core;
use rqa_core::{Measure, MeasurePoint, MeasureSeries, Norm, TimeSeries};

create_exception!(rqa, RqaError, PyValueError);

fn err(e: core::Error) -> PyErr {
    RqaError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = core::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn parse_date(s: &str) -> PyResult<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| RqaError::new_err(format!("invalid date `{s}`")))
}

fn measure_list(names: Option<Vec<String>>, default: &[Measure]) -> PyResult<Vec<Measure>> {
    match names {
        None => Ok(default.to_vec()),
        Some(names) => names.iter().map(|n| parse(n)).collect(),
    }
}

/// A daily series; dates default to consecutive days from 2000-01-01.
fn series(values: Vec<f64>, dates: Option<Vec<String>>) -> PyResult<TimeSeries> {
    match dates {
        Some(d) => {
            let d = d.iter().map(|s| parse_date(s)).collect::<PyResult<_>>()?;
            TimeSeries::new(d, values).map_err(err)
        }
        None => TimeSeries::with_daily_dates(NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(), values)
            .map_err(err),
    }
}

/// `{measure: [(index, date or None, value or None), ...]}`
fn series_dict<'py>(py: Python<'py>, all: &[MeasureSeries]) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for s in all {
        let points: Vec<(usize, Option<String>, Option<f64>)> = s
            .points
            .iter()
            .map(|p| (p.index, p.date.map(|d| d.to_string()), p.value))
            .collect();
        out.set_item(s.measure.name(), points)?;
    }
    Ok(out)
}

fn measure_dict<'py>(py: Python<'py>, m: &core::MeasureSet) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for measure in Measure::ALL {
        out.set_item(measure.name(), m.get(measure))?;
    }
    out.set_item("window_end", m.window_end)?;
    Ok(out)
}

#[pyclass(name = "EmbeddingConfig", from_py_object)]
#[derive(Clone, Default)]
struct PyEmbeddingConfig {
    inner: core::EmbeddingConfig,
}

#[pymethods]
impl PyEmbeddingConfig {
    #[new]
    #[pyo3(signature = (m=1, tau=1, epsilon=0.1, norm="max", l_min=2, v_min=2, theiler=1))]
    fn new(
        m: usize,
        tau: usize,
        epsilon: f64,
        norm: &str,
        l_min: usize,
        v_min: usize,
        theiler: usize,
    ) -> PyResult<Self> {
        let inner = core::EmbeddingConfig {
            m,
            tau,
            epsilon,
            norm: parse::<Norm>(norm)?,
            l_min,
            v_min,
            theiler,
        };
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn tau(&self) -> usize {
        self.inner.tau
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn norm(&self) -> String {
        self.inner.norm.to_string()
    }

    #[getter]
    fn l_min(&self) -> usize {
        self.inner.l_min
    }

    #[getter]
    fn v_min(&self) -> usize {
        self.inner.v_min
    }

    #[getter]
    fn theiler(&self) -> usize {
        self.inner.theiler
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "EmbeddingConfig(m={}, tau={}, epsilon={}, norm='{}', l_min={}, v_min={}, theiler={})",
            c.m, c.tau, c.epsilon, c.norm, c.l_min, c.v_min, c.theiler
        )
    }
}

fn config_or_default(config: Option<PyEmbeddingConfig>) -> core::EmbeddingConfig {
    config.map(|c| c.inner).unwrap_or_default()
}

#[pyclass(name = "RecurrencePlot", frozen)]
struct PyRecurrencePlot {
    inner: core::RecurrencePlot,
}

#[pymethods]
impl PyRecurrencePlot {
    /// Embeds `values` as given (normalize first if needed) and thresholds all pairs.
    #[staticmethod]
    #[pyo3(signature = (values, config=None))]
    fn from_series(values: Vec<f64>, config: Option<PyEmbeddingConfig>) -> PyResult<Self> {
        let cfg = config_or_default(config);
        let inner = core::RecurrencePlot::from_series(&values, &cfg).map_err(err)?;
        Ok(Self { inner })
    }

    /// Wraps an explicit square boolean matrix.
    #[staticmethod]
    fn from_matrix(rows: Vec<Vec<bool>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(RqaError::new_err("matrix must be square"));
        }
        Ok(Self {
            inner: core::RecurrencePlot::from_fn(n, |i, j| rows[i][j]),
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<bool> {
        if i >= self.inner.n() || j >= self.inner.n() {
            return Err(RqaError::new_err("index out of range"));
        }
        Ok(self.inner.get(i, j))
    }

    fn count_ones(&self) -> u64 {
        self.inner.count_ones()
    }

    fn to_list(&self) -> Vec<Vec<bool>> {
        self.inner.to_rows()
    }

    fn window(&self, start: usize, len: usize) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.window(start, len).map_err(err)?,
        })
    }

    /// Binary PGM image bytes, origin at the bottom left.
    fn raster<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &core::io::rp_raster(&self.inner))
    }

    #[pyo3(signature = (config=None))]
    fn measures<'py>(
        &self,
        py: Python<'py>,
        config: Option<PyEmbeddingConfig>,
    ) -> PyResult<Bound<'py, PyDict>> {
        compute_measures(py, self, config)
    }

    #[pyo3(signature = (ws=250, step=1, measures=None, config=None))]
    fn windowed<'py>(
        &self,
        py: Python<'py>,
        ws: usize,
        step: usize,
        measures: Option<Vec<String>>,
        config: Option<PyEmbeddingConfig>,
    ) -> PyResult<Bound<'py, PyDict>> {
        windowed_measures(py, self, ws, step, measures, config)
    }

    fn __repr__(&self) -> String {
        format!(
            "RecurrencePlot(n={}, ones={})",
            self.inner.n(),
            self.inner.count_ones()
        )
    }
}

/// z-score with the sample standard deviation.
#[pyfunction]
fn normalize(values: Vec<f64>) -> PyResult<Vec<f64>> {
    core::normalize(&values).map_err(err)
}

/// Delay vectors `(x[i], x[i + tau], ..., x[i + (m - 1) tau])`.
#[pyfunction]
fn delay_embed(values: Vec<f64>, m: usize, tau: usize) -> PyResult<Vec<Vec<f64>>> {
    let e = core::delay_embed(&values, m, tau).map_err(err)?;
    Ok(e.points().map(<[f64]>::to_vec).collect())
}

#[pyfunction]
#[pyo3(signature = (values, max_lag, bins=16))]
fn average_mutual_information(values: Vec<f64>, max_lag: usize, bins: usize) -> PyResult<Vec<f64>> {
    core::average_mutual_information(&values, max_lag, bins).map_err(err)
}

#[pyfunction]
fn first_minimum(curve: Vec<f64>) -> Option<usize> {
    core::first_minimum(&curve)
}

/// False-neighbour share for `m = 1..=max_m` (element `m - 1`).
#[pyfunction]
#[pyo3(signature = (values, tau, max_m, rtol=15.0, atol=2.0))]
fn false_nearest_neighbors(
    values: Vec<f64>,
    tau: usize,
    max_m: usize,
    rtol: f64,
    atol: f64,
) -> PyResult<Vec<f64>> {
    core::false_nearest_neighbors(&values, tau, max_m, rtol, atol).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rp, config=None))]
fn compute_measures<'py>(
    py: Python<'py>,
    rp: &PyRecurrencePlot,
    config: Option<PyEmbeddingConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.map(|c| c.inner).unwrap_or(*rp.inner.config());
    measure_dict(py, &core::compute_measures(&rp.inner, &cfg))
}

#[pyfunction]
#[pyo3(signature = (rp, ws=250, step=1, measures=None, config=None))]
fn windowed_measures<'py>(
    py: Python<'py>,
    rp: &PyRecurrencePlot,
    ws: usize,
    step: usize,
    measures: Option<Vec<String>>,
    config: Option<PyEmbeddingConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.map(|c| c.inner).unwrap_or(*rp.inner.config());
    let measures = measure_list(measures, &Measure::ALL)?;
    let all = py
        .detach(|| core::windowed_selected(&rp.inner, &cfg, ws, step, &measures))
        .map_err(err)?;
    series_dict(py, &all)
}

/// Rolling causal monitor; returns `{measure: [(index, date, value), ...]}`.
#[pyfunction]
#[pyo3(signature = (values, dates=None, lpr=1500, ws=250, measures=None, scope="subseries", config=None))]
#[allow(clippy::too_many_arguments)]
fn monitor_series<'py>(
    py: Python<'py>,
    values: Vec<f64>,
    dates: Option<Vec<String>>,
    lpr: usize,
    ws: usize,
    measures: Option<Vec<String>>,
    scope: &str,
    config: Option<PyEmbeddingConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let scope = match scope {
        "subseries" => core::NormalizationScope::Subseries,
        "global" => core::NormalizationScope::Global,
        "off" => core::NormalizationScope::Off,
        other => return Err(RqaError::new_err(format!("unknown scope `{other}`"))),
    };
    let cfg = core::MonitorConfig {
        lpr,
        ws,
        embedding: config_or_default(config),
        measures: measure_list(measures, &[Measure::Lam])?,
        scope,
    };
    let s = series(values, dates)?;
    let all = py.detach(|| core::monitor_series(&s, &cfg)).map_err(err)?;
    series_dict(py, &all)
}

/// Segments a LAM series. Returns the report as a dict; crisis fields are
/// None when no crisis is found.
#[pyfunction]
#[pyo3(signature = (values, dates=None, indices=None, width=11, band=0.02, instability_drop=0.02, crisis_drop=0.05))]
#[allow(clippy::too_many_arguments)]
fn segment_lam<'py>(
    py: Python<'py>,
    values: Vec<Option<f64>>,
    dates: Option<Vec<String>>,
    indices: Option<Vec<usize>>,
    width: usize,
    band: f64,
    instability_drop: f64,
    crisis_drop: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let n = values.len();
    let indices = indices.unwrap_or_else(|| (0..n).collect());
    let dates: Vec<Option<NaiveDate>> = match dates {
        Some(d) => d
            .iter()
            .map(|s| parse_date(s).map(Some))
            .collect::<PyResult<_>>()?,
        None => vec![None; n],
    };
    if indices.len() != n || dates.len() != n {
        return Err(RqaError::new_err(
            "values, dates and indices differ in length",
        ));
    }
    let lam = MeasureSeries {
        measure: Measure::Lam,
        points: (0..n)
            .map(|i| MeasurePoint {
                index: indices[i],
                date: dates[i],
                value: values[i],
            })
            .collect(),
        ws: 0,
        step: 1,
        embedding: core::EmbeddingConfig::default(),
    };
    let params = core::SegmentParams {
        width,
        band,
        instability_drop,
        crisis_drop,
    };
    let report = match core::segment_lam(&lam, &params) {
        Ok(r) => r,
        Err(core::Error::NoCrisisDetected(r)) => *r,
        Err(e) => return Err(err(e)),
    };
    py.import("json")?
        .call_method1("loads", (report.to_json(),))
}

/// Reads `date` and `column` from a CSV file; returns `(dates, values)`.
#[pyfunction]
#[pyo3(signature = (path, column="close"))]
fn load_csv(path: std::path::PathBuf, column: &str) -> PyResult<(Vec<String>, Vec<f64>)> {
    let s = core::io::load_csv(path, column).map_err(err)?;
    Ok((
        s.dates().iter().map(|d| d.to_string()).collect(),
        s.values().to_vec(),
    ))
}

#[pymodule]
fn rqa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RqaError", m.py().get_type::<RqaError>())?;
    m.add_class::<PyEmbeddingConfig>()?;
    m.add_class::<PyRecurrencePlot>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(delay_embed, m)?)?;
    m.add_function(wrap_pyfunction!(average_mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(first_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(false_nearest_neighbors, m)?)?;
    m.add_function(wrap_pyfunction!(compute_measures, m)?)?;
    m.add_function(wrap_pyfunction!(windowed_measures, m)?)?;
    m.add_function(wrap_pyfunction!(monitor_series, m)?)?;
    m.add_function(wrap_pyfunction!(segment_lam, m)?)?;
    m.add_function(wrap_pyfunction!(load_csv, m)?)?;
    Ok(())
}
