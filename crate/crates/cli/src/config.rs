//! Run configuration: built-in defaults, then a JSON config file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rqa_core::{EmbeddingConfig, Measure, MonitorConfig, Norm, NormalizationScope, SegmentParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
    Pgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Subseries,
    Global,
    Off,
}

impl From<Scope> for NormalizationScope {
    fn from(s: Scope) -> Self {
        match s {
            Scope::Subseries => NormalizationScope::Subseries,
            Scope::Global => NormalizationScope::Global,
            Scope::Off => NormalizationScope::Off,
        }
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub column: String,
    pub embedding: EmbeddingConfig,
    pub ws: usize,
    pub lpr: usize,
    pub step: usize,
    pub segment: SegmentParams,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    /// Measures to record; `None` means the subcommand's own default.
    pub measures: Option<Vec<Measure>>,
    pub scope: Scope,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            column: "close".into(),
            embedding: EmbeddingConfig::default(),
            ws: 250,
            lpr: 1500,
            step: 1,
            segment: SegmentParams::default(),
            out_dir: PathBuf::from("."),
            formats: Vec::new(),
            measures: None,
            scope: Scope::Subseries,
        }
    }
}

/// Settings a config file or the command line may set. Unset fields leave the
/// layer below untouched.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    /// Value column of the input CSV [default: close]
    #[arg(long)]
    pub column: Option<String>,
    /// Embedding dimension [default: 1]
    #[arg(long)]
    pub m: Option<usize>,
    /// Embedding delay in samples [default: 1]
    #[arg(long)]
    pub tau: Option<usize>,
    /// Recurrence threshold on the normalized series [default: 0.1]
    #[arg(long = "eps", visible_alias = "epsilon")]
    #[serde(alias = "eps")]
    pub epsilon: Option<f64>,
    /// Distance norm: max or euclidean [default: max]
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Minimal diagonal line length [default: 2]
    #[arg(long)]
    pub l_min: Option<usize>,
    /// Minimal vertical line length [default: 2]
    #[arg(long)]
    pub v_min: Option<usize>,
    /// Diagonals with |i - j| below this are ignored by diagonal measures [default: 1]
    #[arg(long)]
    pub theiler: Option<usize>,
    /// Window size [default: 250]
    #[arg(long)]
    pub ws: Option<usize>,
    /// Trailing subseries length for the monitor [default: 1500]
    #[arg(long)]
    pub lpr: Option<usize>,
    /// Window advance [default: 1]
    #[arg(long)]
    pub step: Option<usize>,
    /// Moving-average width for segmentation [default: 11]
    #[arg(long)]
    pub smooth_width: Option<usize>,
    /// Depth of the normal LAM band [default: 0.02]
    #[arg(long)]
    pub band: Option<f64>,
    /// LAM drop that marks instability [default: 0.02]
    #[arg(long)]
    pub instability_drop: Option<f64>,
    /// LAM drop that marks a crisis [default: 0.05]
    #[arg(long)]
    pub crisis_drop: Option<f64>,
    /// Output directory [default: .]
    #[arg(long, short = 'o')]
    pub out_dir: Option<PathBuf>,
    /// Extra output formats (csv, svg, pgm), comma separated
    #[arg(long, value_delimiter = ',')]
    pub formats: Option<Vec<Format>>,
    /// Measures to record, comma separated (rr,det,l,lmax,div,entr,trend,lam,tt,t1,t2)
    #[arg(long, value_delimiter = ',')]
    pub measures: Option<Vec<Measure>>,
    /// Normalization scope for the monitor [default: subseries]
    #[arg(long, value_enum)]
    pub scope: Option<Scope>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn apply(&self, cfg: &mut RunConfig) {
        fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
            if let Some(v) = value {
                *slot = v.clone();
            }
        }
        set(&mut cfg.column, &self.column);
        set(&mut cfg.embedding.m, &self.m);
        set(&mut cfg.embedding.tau, &self.tau);
        set(&mut cfg.embedding.epsilon, &self.epsilon);
        set(&mut cfg.embedding.norm, &self.norm);
        set(&mut cfg.embedding.l_min, &self.l_min);
        set(&mut cfg.embedding.v_min, &self.v_min);
        set(&mut cfg.embedding.theiler, &self.theiler);
        set(&mut cfg.ws, &self.ws);
        set(&mut cfg.lpr, &self.lpr);
        set(&mut cfg.step, &self.step);
        set(&mut cfg.segment.width, &self.smooth_width);
        set(&mut cfg.segment.band, &self.band);
        set(&mut cfg.segment.instability_drop, &self.instability_drop);
        set(&mut cfg.segment.crisis_drop, &self.crisis_drop);
        set(&mut cfg.out_dir, &self.out_dir);
        set(&mut cfg.formats, &self.formats);
        set(&mut cfg.scope, &self.scope);
        if self.measures.is_some() {
            cfg.measures = self.measures.clone();
        }
    }
}

impl RunConfig {
    /// Defaults, then the optional config file, then the flags.
    pub fn resolve(config_file: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = config_file {
            Overrides::from_file(path)?.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.embedding
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if cfg.ws == 0 || cfg.step == 0 {
            return Err(CliError::Usage("ws and step must be at least 1".into()));
        }
        cfg.segment
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    pub fn measures_or(&self, default: &[Measure]) -> Vec<Measure> {
        let mut m = self.measures.clone().unwrap_or_else(|| default.to_vec());
        m.sort();
        m.dedup();
        m
    }

    pub fn monitor(&self) -> MonitorConfig {
        MonitorConfig {
            lpr: self.lpr,
            ws: self.ws,
            embedding: self.embedding,
            measures: self.measures_or(&[Measure::Lam]),
            scope: self.scope.into(),
        }
    }
}
