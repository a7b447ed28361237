// `!(x > 0)` is used on purpose so that NaN config values are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use config::{BackendKind, RunConfig, OUTPUT_DIR_ENV};

/// Lindblad spectra and dynamics with the non-Hermitian kernel polynomial method.
#[derive(Parser, Debug)]
#[command(name = "nhkpm", version)]
pub struct Cli {
    /// TOML run configuration; without it the default N = 2 model is used.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `backend` from the config.
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendKind>,
    /// Worker threads; output is bit-identical for a fixed count.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Second pass on re_min,re_max,im_min,im_max at the same node count.
    #[arg(long, global = true, value_parser = parse_window, allow_hyphen_values = true)]
    pub refine: Option<[f64; 4]>,
    /// Also write an SVG heatmap of |C(ω)|.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Print the transformed Liouvillian term list before running.
    #[arg(long, global = true)]
    pub dump_terms: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectral map C(ω) on the configured grid.
    Spectrum,
    /// C(t) reconstructed from the spectral map.
    Dynamics {
        /// Overlay an exact reference as extra columns.
        #[arg(long, value_enum)]
        oracle: Option<OracleKind>,
    },
    /// Projected correlator C_P(Γ) over the grid's real axis and the relaxation rate.
    Project,
    /// Projected correlator and Δ for every γ of `[gamma_scan]`.
    ZenoScan,
    /// Exact reference dynamics.
    Oracle {
        #[arg(value_enum)]
        which: OracleKind,
    },
    /// Consistency checks on the configured model; exit 1 names the failed check.
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Ed,
    Rk4,
    Damping,
}

fn parse_window(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> =
        s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"))).collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c, d] if a < b && c < d => Ok([a, b, c, d]),
        [_, _, _, _] => Err("expected re_min < re_max and im_min < im_max".into()),
        _ => Err("expected four comma-separated numbers re_min,re_max,im_min,im_max".into()),
    }
}

/// 0 ok, 1 invariant failure, 2 configuration error, 3 resource error.
#[derive(Debug)]
pub enum CliError {
    Invariant(String),
    Config(String),
    Resource(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Invariant(_) => 1,
            Self::Config(_) => 2,
            Self::Resource(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Invariant(m) | Self::Config(m) | Self::Resource(m) => m,
        }
    }
}

impl From<nhkpm::Error> for CliError {
    fn from(e: nhkpm::Error) -> Self {
        use nhkpm::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidParameter(_) | E::DimensionMismatch { .. } | E::RangeTooLong { .. } | E::Unsupported(_) => {
                Self::Config(msg)
            }
            E::SizeLimit { .. } | E::Resource { .. } | E::Io(_) => Self::Resource(msg),
            _ => Self::Invariant(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Resource(e.to_string())
    }
}

pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(CliError::Config)?,
        None => RunConfig::default_model(),
    };
    if let Some(b) = cli.backend {
        cfg.backend = b;
    }
    if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
        if !dir.is_empty() {
            cfg.output_dir = PathBuf::from(dir);
        }
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

/// Loads the config, sizes the worker pool and runs the command.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Resource(format!("worker pool: {e}")))?;
    pool.install(|| commands::run(cli, &cfg, workers))
}
