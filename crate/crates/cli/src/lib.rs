//! The `rqa` command line: embedding diagnostics, windowed and rolling
//! laminarity, segmentation and rendering for daily price files.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rqa_core::Measure;

pub use config::{Format, Overrides, RunConfig, Scope};

#[derive(Debug, Parser)]
#[command(
    name = "rqa",
    version,
    about = "Recurrence quantification of daily market series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON file with settings; explicit flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutual information and false-nearest-neighbour curves with suggested tau and m
    Embed {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Largest lag of the mutual information curve
        #[arg(long, default_value_t = 60)]
        max_lag: usize,
        /// Histogram bins per axis
        #[arg(long, default_value_t = 16)]
        bins: usize,
        /// Largest embedding dimension tested for false neighbours
        #[arg(long, default_value_t = 10)]
        max_dim: usize,
        #[arg(long, default_value_t = 15.0)]
        rtol: f64,
        #[arg(long, default_value_t = 2.0)]
        atol: f64,
        /// Suggested m is the first dimension whose false-neighbour share is below this
        #[arg(long, default_value_t = 0.05)]
        fnn_threshold: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Windowed measures along the whole normalized series
    Analyze {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Causal rolling laminarity: each day uses only the trailing lpr observations
    Monitor {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Regime periods and crisis statistics from a measures CSV
    Segment {
        input: PathBuf,
        /// Column of the measures CSV to segment
        #[arg(long, default_value = "lam")]
        measure: Measure,
        #[command(flatten)]
        common: Common,
    },
    /// Recurrence plot raster (pgm) and price/measure chart (svg)
    Render {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

impl From<rqa_core::Error> for CliError {
    fn from(e: rqa_core::Error) -> Self {
        if e.is_data_error() {
            CliError::Data(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("rqa: {}", e.message());
            e.exit_code()
        }
    }
}
