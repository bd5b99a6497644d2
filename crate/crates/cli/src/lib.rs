//! Command-line runner for ABC Shadow experiments.
//!
//! Every subcommand resolves a JSON [`config::ExperimentConfig`], computes all
//! of its artifacts in memory and only then writes them, each through a
//! temporary file and a rename, next to a `manifest.json`.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "ABC_SHADOW_OUT";

#[derive(Parser, Debug)]
#[command(name = "abc-shadow", version, about = "ABC Shadow posterior sampling experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON experiment config, layered over the subcommand's preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config value: `--set shadow.inner_steps=200`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for replicate-parallel work.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory; falls back to the config, then $ABC_SHADOW_OUT, then `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PatternArgs {
    /// Pattern CSV with header `x,y` or `x,y,angle`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Window as `x0,y0,x1,y1` (default: the unit square).
    #[arg(long)]
    pub window: Option<String>,
    /// Rescale coordinates into [0,1]² by the bounding box's longer side.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Strauss,
    Candy,
    Area,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gaussian posterior: direct MH against ABC Shadow.
    GaussianBench(Common),
    /// Strauss forward simulation and posterior.
    StraussBench(Common),
    /// Candy forward simulation and posterior.
    CandyBench(Common),
    /// Sufficient statistics of a pattern over a set of ranges.
    AnalyzePattern {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long, value_enum)]
        model: Option<ModelKind>,
        /// Interaction ranges, comma separated.
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
    },
    /// K, F, G, J curves with binomial Monte Carlo envelopes.
    Envelope {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pattern: PatternArgs,
    },
    /// Asymptotic and Monte Carlo standard deviations at given estimates.
    Errors(Common),
    /// ABC Shadow runs over several Δ and initial states.
    DeltaSweep(Common),
    /// A generic ABC Shadow run; statistics from `t_obs` or a pattern.
    Shadow {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pattern: PatternArgs,
    },
    /// ABC rejection sampling.
    AbcReject(Common),
    /// k-nearest-neighbour ABC.
    AbcKnn(Common),
    /// Auxiliary-variable Metropolis-Hastings.
    AuxMh(Common),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GaussianBench(_) => "gaussian-bench",
            Command::StraussBench(_) => "strauss-bench",
            Command::CandyBench(_) => "candy-bench",
            Command::AnalyzePattern { .. } => "analyze-pattern",
            Command::Envelope { .. } => "envelope",
            Command::Errors(_) => "errors",
            Command::DeltaSweep(_) => "delta-sweep",
            Command::Shadow { .. } => "shadow",
            Command::AbcReject(_) => "abc-reject",
            Command::AbcKnn(_) => "abc-knn",
            Command::AuxMh(_) => "aux-mh",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::GaussianBench(c)
            | Command::StraussBench(c)
            | Command::CandyBench(c)
            | Command::Errors(c)
            | Command::DeltaSweep(c)
            | Command::AbcReject(c)
            | Command::AbcKnn(c)
            | Command::AuxMh(c) => c,
            Command::AnalyzePattern { common, .. }
            | Command::Envelope { common, .. }
            | Command::Shadow { common, .. } => common,
        }
    }
}

pub use commands::{run, RunReport};
