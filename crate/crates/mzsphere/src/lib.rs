//! File formats, configuration and the `mzsphere` command-line front-end for
//! [`mzsphere_core`].
//!
//! Every artifact is CSV or JSON. Floats in CSV carry 17 significant digits,
//! so files re-read into bit-identical values, and re-running a command with
//! the same inputs and seed reproduces its outputs byte for byte.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod experiment;
pub mod formats;
pub mod io;

use config::*;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mzsphere_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("{0}")]
    Schema(String),
}

impl CliError {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        use mzsphere_core::Error as E;
        match self {
            CliError::Core(E::Hypothesis(_)) => "hypothesis",
            CliError::Core(E::QuadratureNonConvergence { .. } | E::SvdFailure) => "numerical",
            CliError::Core(_) => "invalid_input",
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Schema(_) => "schema",
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}`.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}

#[derive(Debug, Parser)]
#[command(name = "mzsphere", version, about = "Deconvolution on the sphere from scattered noisy samples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equal-area partition as JSON, optionally with its node CSV.
    Partition {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: PartitionParams,
    },
    /// One node per partition region as CSV.
    Nodes {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: NodesParams,
    },
    /// Multiplier sequence of a filter, with fitted decay constants.
    Filter {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: FilterParams,
    },
    /// Filtered, sampled and noisy data from a known truth.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: SimulateParams,
    },
    /// Least-squares reconstruction of degree m.
    Reconstruct {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: ReconstructParams,
    },
    /// Error certificate, checked against the truth when it is given.
    Certify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: CertifyParams,
    },
    /// Frame constants of a sampling family, or the search for one.
    VerifyMz {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: VerifyMzParams,
    },
    /// Convergence sweep over degrees and noise levels as CSV.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: ExperimentParams,
    },
}

pub fn run(command: Command) -> Result<()> {
    use commands as c;
    match command {
        Command::Partition { config, params } => c::partition(params.merge_config(config.as_deref())?),
        Command::Nodes { config, params } => c::nodes(params.merge_config(config.as_deref())?),
        Command::Filter { config, params } => c::filter(params.merge_config(config.as_deref())?),
        Command::Simulate { config, params } => c::simulate_cmd(params.merge_config(config.as_deref())?),
        Command::Reconstruct { config, params } => c::reconstruct(params.merge_config(config.as_deref())?),
        Command::Certify { config, params } => c::certify(params.merge_config(config.as_deref())?),
        Command::VerifyMz { config, params } => c::verify_mz(params.merge_config(config.as_deref())?),
        Command::Experiment { config, params } => c::experiment_cmd(params.merge_config(config.as_deref())?),
    }
}
