//! Parameter records shared by `--config` files and command-line flags.
//!
//! Each record is a set of optional fields. A config file fills some of them,
//! flags fill others, and flags win. Relative paths in a config file are taken
//! relative to the file's directory.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::{io, CliError, Result};

/// Field types that may carry paths.
pub trait Rebase {
    fn rebase(&mut self, _dir: &Path) {}
}

impl Rebase for PathBuf {
    fn rebase(&mut self, dir: &Path) {
        if self.is_relative() {
            *self = dir.join(&*self);
        }
    }
}

impl<T: Rebase> Rebase for Option<T> {
    fn rebase(&mut self, dir: &Path) {
        if let Some(v) = self {
            v.rebase(dir);
        }
    }
}

impl Rebase for f64 {}
impl Rebase for u64 {}
impl Rebase for usize {}
impl Rebase for String {}
impl Rebase for Vec<f64> {}

macro_rules! params {
    ($(#[$meta:meta])* $name:ident { $( $(#[$fmeta:meta])* $field:ident : $ty:ty ),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, clap::Args, serde::Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fmeta])*
                #[arg(long)]
                pub $field: Option<$ty>,
            )*
        }

        impl $name {
            /// Fields set here take precedence over `base`.
            pub fn overlay(self, base: Self) -> Self {
                Self { $( $field: self.$field.or(base.$field), )* }
            }

            fn rebase(&mut self, dir: &Path) {
                $( Rebase::rebase(&mut self.$field, dir); )*
            }
        }

        impl Params for $name {
            fn merge_config(self, config: Option<&Path>) -> Result<Self> {
                match config {
                    None => Ok(self),
                    Some(path) => {
                        let mut base: Self = io::read_json(path)?;
                        base.rebase(path.parent().unwrap_or(Path::new(".")));
                        Ok(self.overlay(base))
                    }
                }
            }
        }
    };
}

pub trait Params: Sized + DeserializeOwned {
    /// Loads `config` (when given) underneath the flags already in `self`.
    fn merge_config(self, config: Option<&Path>) -> Result<Self>;
}

/// The value of a required field.
pub fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| CliError::Schema(format!("missing required parameter '{name}'")))
}

params!(
    /// `partition`: the equal-area partition and its nodes.
    PartitionParams {
        /// Number of regions (at least 50).
        n: usize,
        /// Partition JSON; stdout when absent.
        out: PathBuf,
        /// Optional node CSV.
        nodes_out: PathBuf,
        /// `center` (default) or `random`.
        rule: String,
        seed: u64,
    }
);

params!(
    /// `nodes`: one node per region as CSV.
    NodesParams {
        n: usize,
        rule: String,
        seed: u64,
        out: PathBuf,
    }
);

params!(
    /// `filter`: a multiplier sequence from a named profile.
    FilterParams {
        /// identity, cap, planck, lunar or tabulated.
        kind: String,
        m_max: usize,
        /// Cap half-angle in radians.
        theta0: f64,
        /// Planck wavelength.
        lambda0: f64,
        /// Planck aperture or lunar radius.
        radius: f64,
        /// Lunar angle parameter.
        t: f64,
        /// Tabulated profile CSV with header `r,value`.
        profile: PathBuf,
        /// `closed` (default for caps) or `quadrature`.
        method: String,
        /// Quadrature agreement tolerance.
        tol: f64,
        /// Decay exponent for the upper fit.
        gamma: f64,
        /// Exponent for the lower fit.
        zeta: f64,
        out: PathBuf,
        /// CSV with columns m, b_m, weighted.
        table_out: PathBuf,
    }
);

params!(
    /// `simulate`: noisy samples of a filtered truth.
    SimulateParams {
        filter: PathBuf,
        /// Coefficient JSON; a random truth is drawn when absent.
        truth: PathBuf,
        truth_degree: usize,
        truth_sigma: f64,
        truth_seed: u64,
        /// Where the drawn truth is saved.
        truth_out: PathBuf,
        /// Node CSV; otherwise a partition of `n` regions is used.
        nodes: PathBuf,
        n: usize,
        rule: String,
        beta: f64,
        seed: u64,
        /// Measurement CSV; the sidecar JSON is written beside it.
        out: PathBuf,
    }
);

params!(
    /// `reconstruct`: weighted least squares over degree `m`.
    ReconstructParams {
        measurements: PathBuf,
        filter: PathBuf,
        m: usize,
        out: PathBuf,
    }
);

params!(
    /// `certify`: the a-priori bound, verified when the truth is known.
    CertifyParams {
        measurements: PathBuf,
        filter: PathBuf,
        solution: PathBuf,
        truth: PathBuf,
        m: usize,
        omega: f64,
        zeta: f64,
        /// Overrides the sidecar noise level.
        beta: f64,
        /// `‖f‖_{H^ω}` when the truth is not available.
        norm_f_omega: f64,
        out: PathBuf,
    }
);

params!(
    /// `verify-mz`: frame constants of a family, or the doubling search.
    VerifyMzParams {
        m: usize,
        n: usize,
        nodes: PathBuf,
        rule: String,
        seed: u64,
        /// Search target for epsilon when neither `n` nor `nodes` is given.
        target: f64,
        max_n: usize,
        out: PathBuf,
    }
);

params!(
    /// `experiment`: the convergence sweep over degrees and noise levels.
    ExperimentParams {
        filter: PathBuf,
        omega: f64,
        zeta: f64,
        #[arg(value_delimiter = ',')]
        betas: Vec<f64>,
        m_min: usize,
        m_max: usize,
        truth_degree: usize,
        seed: u64,
        /// Fixed partition size; otherwise searched per degree.
        n: usize,
        target: f64,
        max_n: usize,
        out: PathBuf,
    }
);
