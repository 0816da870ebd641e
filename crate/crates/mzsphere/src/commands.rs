//! One function per subcommand. Each reads its inputs, calls into the core
//! crate and writes its artifact, to stdout when no output path is given.

use std::io::Write;
use std::path::{Path, PathBuf};

use mzsphere_core::certify::{bound_apriori, find_mz_family, mz_constants, verify_bound, BoundInputs};
use mzsphere_core::filters::{
    cap_multipliers, fit_decay, fit_lower, multipliers_from_profile, MultiplierFilter, RadialProfile, Tabulated,
};
use mzsphere_core::forward::{apply_multiplier, simulate};
use mzsphere_core::geometry::{pick_nodes, EqualAreaPartition, MzFamily, NodeRule};
use mzsphere_core::harmonics::{random_poly, SobolevParams};
use mzsphere_core::reconstruct::lsq_solve;
use mzsphere_core::special::{lambda_sq, JacobiParams};

use crate::config::*;
use crate::experiment::{self, Sampling, Sweep};
use crate::formats::*;
use crate::io::{self, fmt_f64, Table};
use crate::{CliError, Result};

const DEFAULT_TARGET: f64 = 0.5;
const DEFAULT_MAX_N: usize = 1 << 18;
const DEFAULT_TOL: f64 = 1e-10;

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => io::write_atomic(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn emit_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    emit(out, io::to_json(value)?.as_bytes())
}

/// `center` needs no seed; `random` does.
fn node_rule(rule: Option<&str>, seed: Option<u64>) -> Result<NodeRule> {
    match rule.unwrap_or("center") {
        "center" => Ok(NodeRule::AreaCenter),
        "random" => Ok(NodeRule::RandomInRegion {
            seed: seed.ok_or_else(|| CliError::Schema("rule 'random' requires --seed".into()))?,
        }),
        other => Err(CliError::Schema(format!("unknown node rule '{other}' (use center or random)"))),
    }
}

fn partition_family(n: usize, rule: NodeRule) -> Result<MzFamily> {
    Ok(pick_nodes(&EqualAreaPartition::build(n)?, rule))
}

fn read_filter(path: &Path) -> Result<MultiplierFilter> {
    io::read_json::<FilterJson>(path)?.to_core()
}

pub fn partition(p: PartitionParams) -> Result<()> {
    let part = EqualAreaPartition::build(need(&p.n, "n")?)?;
    if let Some(path) = &p.nodes_out {
        let fam = pick_nodes(&part, node_rule(p.rule.as_deref(), p.seed)?);
        io::write_atomic(path, &io::nodes_csv(&fam))?;
    }
    emit_json(p.out.as_deref(), &PartitionJson::from(&part))
}

pub fn nodes(p: NodesParams) -> Result<()> {
    let fam = partition_family(need(&p.n, "n")?, node_rule(p.rule.as_deref(), p.seed)?)?;
    emit(p.out.as_deref(), &io::nodes_csv(&fam))
}

fn need_profile_param(v: Option<f64>, name: &str, kind: &str) -> Result<f64> {
    v.ok_or_else(|| CliError::Schema(format!("filter kind '{kind}' requires '{name}'")))
}

/// Builds the filter and applies the requested fits.
pub fn build_filter(p: &FilterParams) -> Result<MultiplierFilter> {
    let kind = need(&p.kind, "kind")?;
    let m_max = need(&p.m_max, "m_max")?;
    let tol = p.tol.unwrap_or(DEFAULT_TOL);
    let quadrature = |profile: RadialProfile| multipliers_from_profile(&profile, JacobiParams::S2, m_max, tol);
    let (mut f, default_fit) = match kind.as_str() {
        "identity" => (MultiplierFilter::identity(m_max), Some(0.0)),
        "cap" => {
            let theta0 = need_profile_param(p.theta0, "theta0", &kind)?;
            let f = match p.method.as_deref().unwrap_or("closed") {
                "closed" => cap_multipliers(theta0, m_max)?,
                "quadrature" => quadrature(RadialProfile::cap(theta0)?)?,
                other => return Err(CliError::Schema(format!("unknown method '{other}' (use closed or quadrature)"))),
            };
            (f, Some(1.5))
        }
        "planck" => {
            let lambda0 = need_profile_param(p.lambda0, "lambda0", &kind)?;
            let r = need_profile_param(p.radius, "radius", &kind)?;
            (quadrature(RadialProfile::planck(lambda0, r)?)?, None)
        }
        "lunar" => {
            let r = need_profile_param(p.radius, "radius", &kind)?;
            let t = need_profile_param(p.t, "t", &kind)?;
            (quadrature(RadialProfile::lunar(r, t)?)?, None)
        }
        "tabulated" => {
            let path = need(&p.profile, "profile")?;
            let rows = io::read_profile(&path)?;
            let (x, y) = rows.into_iter().unzip();
            (quadrature(RadialProfile::Tabulated(Tabulated::new(x, y)?))?, None)
        }
        other => {
            return Err(CliError::Schema(format!(
                "unknown filter kind '{other}' (use identity, cap, planck, lunar or tabulated)"
            )))
        }
    };
    if let Some(gamma) = p.gamma.or(default_fit) {
        fit_decay(&mut f, gamma)?;
    }
    if let Some(zeta) = p.zeta.or(default_fit) {
        fit_lower(&mut f, zeta)?;
    }
    Ok(f)
}

/// `(1 + m(m+1))^{e/2} |b_m|` with `e` the lower-fit exponent, else the decay one.
pub fn filter_table(f: &MultiplierFilter) -> Vec<u8> {
    let e = f
        .lower_fit
        .map(|l| l.zeta)
        .or(f.decay_fit.map(|d| d.gamma))
        .unwrap_or(0.0);
    let mut t = Table::new(&["m", "b_m", "weighted"]);
    for (m, b) in f.b.iter().enumerate() {
        let w = (1.0 + lambda_sq(m, JacobiParams::S2)).powf(0.5 * e) * b.abs();
        t.row([m.to_string(), fmt_f64(*b), fmt_f64(w)]);
    }
    t.into_bytes()
}

pub fn filter(p: FilterParams) -> Result<()> {
    let f = build_filter(&p)?;
    if let Some(path) = &p.table_out {
        io::write_atomic(path, &filter_table(&f))?;
    }
    emit_json(p.out.as_deref(), &FilterJson::from(&f))
}

pub fn simulate_cmd(p: SimulateParams) -> Result<()> {
    let seed = need(&p.seed, "seed")?;
    let out = need(&p.out, "out")?;
    let filt = read_filter(&need(&p.filter, "filter")?)?;
    let truth = match &p.truth {
        Some(path) => io::read_json::<CoefficientsJson>(path)?.to_core()?,
        None => {
            let degree = need(&p.truth_degree, "truth_degree (or truth)")?;
            let sigma = SobolevParams::new(p.truth_sigma.unwrap_or(2.0))?;
            random_poly(degree, sigma, p.truth_seed.unwrap_or(seed), true)
        }
    };
    if let Some(path) = &p.truth_out {
        io::write_json(path, &CoefficientsJson::from(&truth))?;
    }
    let fam = match (&p.nodes, p.n) {
        (Some(path), _) => io::read_nodes(path)?,
        (None, Some(n)) => partition_family(n, node_rule(p.rule.as_deref(), Some(seed))?)?,
        (None, None) => return Err(CliError::Schema("simulate needs either 'nodes' or 'n'".into())),
    };
    let set = simulate(&truth, &filt, &fam, p.beta.unwrap_or(0.0), seed)?;
    io::write_measurements(&out, &set)
}

pub fn reconstruct(p: ReconstructParams) -> Result<()> {
    let set = io::read_measurements(&need(&p.measurements, "measurements")?)?;
    let filt = read_filter(&need(&p.filter, "filter")?)?;
    let report = lsq_solve(&filt, &set.family()?, need(&p.m, "m")?, &set.y)?;
    emit_json(p.out.as_deref(), &SolutionJson::from(&report))
}

pub fn certify(p: CertifyParams) -> Result<()> {
    let set = io::read_measurements(&need(&p.measurements, "measurements")?)?;
    let filt = read_filter(&need(&p.filter, "filter")?)?;
    let solution = p
        .solution
        .as_deref()
        .map(|path| io::read_json::<SolutionJson>(path)?.coefficients())
        .transpose()?;
    let truth = p
        .truth
        .as_deref()
        .map(|path| io::read_json::<CoefficientsJson>(path)?.to_core())
        .transpose()?;
    let m = match (p.m, &solution) {
        (Some(m), _) => m,
        (None, Some(s)) => s.m_max(),
        (None, None) => return Err(CliError::Schema("missing required parameter 'm'".into())),
    };
    let omega = need(&p.omega, "omega")?;
    let zeta = p.zeta.or(filt.lower_fit.map(|l| l.zeta)).unwrap_or(0.0);
    let beta = p.beta.unwrap_or(set.beta);
    let epsilon = mz_constants(&set.family()?, m)?.epsilon;

    let mut inputs = BoundInputs::sphere(&filt, omega, zeta, epsilon, m, beta)?;
    match &truth {
        Some(t) => {
            let sigma = omega + inputs.gamma;
            inputs.norm_ff_sigma = Some(apply_multiplier(&filt, t)?.sobolev_norm(SobolevParams { sigma }));
            inputs.norm_f_omega = Some(t.sobolev_norm(SobolevParams { sigma: omega }));
        }
        None => inputs.norm_f_omega = p.norm_f_omega,
    }
    let cert = bound_apriori(inputs)?;
    let verify = match (&truth, &solution) {
        (Some(t), Some(s)) => Some(verify_bound(t, &filt, s, &cert)?),
        _ => None,
    };
    emit_json(p.out.as_deref(), &CertificateJson::new(&cert, verify.as_ref()))
}

pub fn verify_mz(p: VerifyMzParams) -> Result<()> {
    let m = need(&p.m, "m")?;
    let rule = node_rule(p.rule.as_deref(), p.seed)?;
    let report = match (&p.nodes, p.n) {
        (Some(path), _) => {
            let fam = io::read_nodes(path)?;
            MzReportJson::new(m, fam.len(), &mz_constants(&fam, m)?)
        }
        (None, Some(n)) => MzReportJson::new(m, n, &mz_constants(&partition_family(n, rule)?, m)?),
        (None, None) => {
            let target = p.target.unwrap_or(DEFAULT_TARGET);
            let found = find_mz_family(m, rule, target, p.max_n.unwrap_or(DEFAULT_MAX_N))?;
            MzReportJson::searched(m, &found)
        }
    };
    emit_json(p.out.as_deref(), &report)
}

pub fn experiment_cmd(p: ExperimentParams) -> Result<()> {
    let filter = read_filter(&need(&p.filter, "filter")?)?;
    let (lo, hi) = (need(&p.m_min, "m_min")?, need(&p.m_max, "m_max")?);
    if lo > hi {
        return Err(CliError::Schema(format!("m_min = {lo} exceeds m_max = {hi}")));
    }
    let sweep = Sweep {
        omega: need(&p.omega, "omega")?,
        zeta: p.zeta.or(filter.lower_fit.map(|l| l.zeta)).unwrap_or(0.0),
        betas: p.betas.clone().unwrap_or_else(|| vec![0.0]),
        degrees: (lo..=hi).collect(),
        truth_degree: p.truth_degree.unwrap_or(filter.m_max().min(40)),
        seed: need(&p.seed, "seed")?,
        sampling: match p.n {
            Some(n) => Sampling::Fixed(n),
            None => Sampling::Search {
                target: p.target.unwrap_or(DEFAULT_TARGET),
                max_n: p.max_n.unwrap_or(DEFAULT_MAX_N),
            },
        },
        filter,
    };
    emit(p.out.as_deref(), &experiment::to_csv(&experiment::run(&sweep)?))
}
