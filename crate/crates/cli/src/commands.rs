use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rqa_core::io::{
    export_chart, export_rp_raster, load_csv, read_measures_csv, write_measures_csv,
};
use rqa_core::{
    average_mutual_information, false_nearest_neighbors, first_minimum, monitor_series, normalize,
    segment_lam, windowed_selected, Error, Measure, MeasureSeries, RecurrencePlot, TimeSeries,
};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::{CliError, Command, Common};

type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Embed {
            inputs,
            max_lag,
            bins,
            max_dim,
            rtol,
            atol,
            fnn_threshold,
            common,
        } => {
            let opts = EmbedOptions {
                max_lag,
                bins,
                max_dim,
                rtol,
                atol,
                fnn_threshold,
            };
            for_each_input("embed", &inputs, &common, |job| embed(job, &opts))
        }
        Command::Analyze { inputs, common } => for_each_input("analyze", &inputs, &common, analyze),
        Command::Monitor { inputs, common } => for_each_input("monitor", &inputs, &common, monitor),
        Command::Render { inputs, common } => for_each_input("render", &inputs, &common, render),
        Command::Segment {
            input,
            measure,
            common,
        } => {
            let cfg = resolve(&common)?;
            segment(&input, measure, &cfg)
        }
    }
}

fn resolve(common: &Common) -> Result<RunConfig> {
    RunConfig::resolve(common.config.as_deref(), &common.flags)
}

/// One input file of a multi-file run.
struct Job<'a> {
    input: &'a Path,
    stem: String,
    cfg: &'a RunConfig,
    series: TimeSeries,
    /// Sidecar log lines; the file is written once the command succeeds.
    log: String,
}

impl Job<'_> {
    fn output(&self, suffix: &str) -> PathBuf {
        self.cfg.out_dir.join(format!("{}.{suffix}", self.stem))
    }

    fn note(&mut self, line: impl AsRef<str>) {
        self.log.push_str(line.as_ref());
        self.log.push('\n');
    }

    fn wrote(&mut self, path: &Path) {
        log::info!("wrote {}", path.display());
        self.note(format!("output: {}", path.display()));
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into())
}

fn prepare_out_dir(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", cfg.out_dir.display())))
}

/// Loads every input and runs `work` on each, in parallel. Each input writes
/// its own files, named after the input's stem.
fn for_each_input(
    name: &str,
    inputs: &[PathBuf],
    common: &Common,
    work: impl Fn(&mut Job) -> Result<()> + Sync,
) -> Result<()> {
    let cfg = resolve(common)?;
    let mut seen = HashSet::new();
    if let Some(dup) = inputs
        .iter()
        .map(|p| stem_of(p))
        .find(|s| !seen.insert(s.clone()))
    {
        return Err(CliError::Usage(format!(
            "two inputs share the file name `{dup}`"
        )));
    }
    prepare_out_dir(&cfg)?;
    let config_echo = serde_json::to_string(&cfg).expect("config serializes");
    let results: Vec<Result<()>> = inputs
        .par_iter()
        .map(|input| {
            let series = load_csv(input, &cfg.column)?;
            let (first, last) = (series.dates()[0], series.dates()[series.len() - 1]);
            log::info!(
                "{}: {} rows, {first} to {last}",
                input.display(),
                series.len()
            );
            let mut job = Job {
                input,
                stem: stem_of(input),
                cfg: &cfg,
                series,
                log: String::new(),
            };
            job.note(format!("command: {name}"));
            job.note(format!("input: {}", input.display()));
            job.note(format!("column: {}", cfg.column));
            job.note(format!("rows: {}", job.series.len()));
            job.note(format!("first_date: {first}"));
            job.note(format!("last_date: {last}"));
            job.note(format!("config: {config_echo}"));
            work(&mut job)?;
            let log_path = job.output(&format!("{name}.log"));
            write(&log_path, job.log.as_bytes())
        })
        .collect();
    // Report the first failing input in argument order.
    results.into_iter().collect()
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| {
        CliError::from(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

struct EmbedOptions {
    max_lag: usize,
    bins: usize,
    max_dim: usize,
    rtol: f64,
    atol: f64,
    fnn_threshold: f64,
}

#[derive(Serialize)]
struct EmbedSummary {
    /// First minimum of the mutual information curve, if it has one.
    tau: Option<usize>,
    /// Delay used for the false-neighbour curve.
    fnn_tau: usize,
    m: Option<usize>,
    max_lag: usize,
    bins: usize,
    max_dim: usize,
    rtol: f64,
    atol: f64,
    fnn_threshold: f64,
}

fn embed(job: &mut Job, opts: &EmbedOptions) -> Result<()> {
    let x = normalize(job.series.values())?;
    let ami = average_mutual_information(&x, opts.max_lag, opts.bins)?;
    let tau = first_minimum(&ami);
    let fnn_tau = tau.unwrap_or(job.cfg.embedding.tau);
    let fnn = false_nearest_neighbors(&x, fnn_tau, opts.max_dim, opts.rtol, opts.atol)?;
    let m = fnn
        .iter()
        .position(|&f| f < opts.fnn_threshold)
        .map(|i| i + 1);
    if tau.is_none() {
        log::warn!(
            "{}: mutual information has no minimum up to lag {}",
            job.input.display(),
            opts.max_lag
        );
    }

    let mut text = String::from("lag,ami\n");
    for (lag, v) in ami.iter().enumerate() {
        writeln!(text, "{lag},{v}").unwrap();
    }
    let path = job.output("ami.csv");
    write(&path, text.as_bytes())?;
    job.wrote(&path);

    let mut text = String::from("m,fnn\n");
    for (i, v) in fnn.iter().enumerate() {
        writeln!(text, "{},{v}", i + 1).unwrap();
    }
    let path = job.output("fnn.csv");
    write(&path, text.as_bytes())?;
    job.wrote(&path);

    let summary = EmbedSummary {
        tau,
        fnn_tau,
        m,
        max_lag: opts.max_lag,
        bins: opts.bins,
        max_dim: opts.max_dim,
        rtol: opts.rtol,
        atol: opts.atol,
        fnn_threshold: opts.fnn_threshold,
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    let path = job.output("embed.json");
    write(&path, json.as_bytes())?;
    job.wrote(&path);
    Ok(())
}

/// The measure drawn in charts: LAM when present, else the first one.
fn chart_measure(series: &[MeasureSeries]) -> &[MeasureSeries] {
    let k = series
        .iter()
        .position(|s| s.measure == Measure::Lam)
        .unwrap_or(0);
    &series[k..=k]
}

fn windowed(job: &Job, measures: &[Measure]) -> Result<Vec<MeasureSeries>> {
    let cfg = job.cfg;
    let x = normalize(job.series.values())?;
    let rp = RecurrencePlot::from_series(&x, &cfg.embedding)?;
    Ok(
        windowed_selected(&rp, &cfg.embedding, cfg.ws, cfg.step, measures)?
            .into_iter()
            .map(|s| s.with_dates(&job.series))
            .collect(),
    )
}

fn analyze(job: &mut Job) -> Result<()> {
    let series = windowed(job, &job.cfg.measures_or(&Measure::ALL))?;
    job.note(format!("windows: {}", series[0].len()));
    let path = job.output("measures.csv");
    write_measures_csv(&series, &path)?;
    job.wrote(&path);
    if job.cfg.wants(Format::Svg) {
        let path = job.output("measures.svg");
        export_chart(&job.series, chart_measure(&series), &path)?;
        job.wrote(&path);
    }
    Ok(())
}

fn monitor(job: &mut Job) -> Result<()> {
    let cfg = job.cfg.monitor();
    let series = monitor_series(&job.series, &cfg)?;
    let undefined = series[0]
        .points
        .iter()
        .filter(|p| p.value.is_none())
        .count();
    job.note(format!("points: {}", series[0].len()));
    job.note(format!("undefined_points: {undefined}"));
    let path = job.output("monitor.csv");
    write_measures_csv(&series, &path)?;
    job.wrote(&path);
    if job.cfg.wants(Format::Svg) {
        let path = job.output("monitor.svg");
        export_chart(&job.series, chart_measure(&series), &path)?;
        job.wrote(&path);
    }
    Ok(())
}

fn render(job: &mut Job) -> Result<()> {
    let cfg = job.cfg;
    let all = cfg.formats.is_empty();
    if all || cfg.wants(Format::Pgm) {
        let x = normalize(job.series.values())?;
        let rp = RecurrencePlot::from_series(&x, &cfg.embedding)?;
        let path = job.output("rp.pgm");
        export_rp_raster(&rp, &path)?;
        job.wrote(&path);
    }
    if all || cfg.wants(Format::Svg) {
        let series = windowed(job, &cfg.measures_or(&[Measure::Lam]))?;
        let path = job.output("chart.svg");
        export_chart(&job.series, &series, &path)?;
        job.wrote(&path);
    }
    if cfg.wants(Format::Csv) {
        let series = windowed(job, &cfg.measures_or(&[Measure::Lam]))?;
        let path = job.output("measures.csv");
        write_measures_csv(&series, &path)?;
        job.wrote(&path);
    }
    Ok(())
}

fn segment(input: &Path, measure: Measure, cfg: &RunConfig) -> Result<()> {
    prepare_out_dir(cfg)?;
    let all = read_measures_csv(input)?;
    let series = all
        .iter()
        .find(|s| s.measure == measure)
        .ok_or_else(|| CliError::Data(format!("{} has no `{measure}` column", input.display())))?;
    let (report, crisis) = match segment_lam(series, &cfg.segment) {
        Ok(r) => (r, true),
        Err(Error::NoCrisisDetected(r)) => (*r, false),
        Err(e) => return Err(e.into()),
    };
    let stem = stem_of(input);
    let path = cfg.out_dir.join(format!("{stem}.segment.json"));
    let mut json = report.to_json();
    json.push('\n');
    write(&path, json.as_bytes())?;

    let mut log = String::new();
    writeln!(log, "command: segment").unwrap();
    writeln!(log, "input: {}", input.display()).unwrap();
    writeln!(log, "measure: {measure}").unwrap();
    writeln!(log, "points: {}", series.len()).unwrap();
    writeln!(
        log,
        "params: {}",
        serde_json::to_string(&cfg.segment).unwrap()
    )
    .unwrap();
    writeln!(log, "crisis_detected: {crisis}").unwrap();
    writeln!(log, "output: {}", path.display()).unwrap();
    write(
        &cfg.out_dir.join(format!("{stem}.segment.log")),
        log.as_bytes(),
    )?;
    if !crisis {
        log::warn!(
            "{}: no crisis detected; report lists the periods found",
            input.display()
        );
    }
    Ok(())
}
