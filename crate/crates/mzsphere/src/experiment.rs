//! Synthetic sweeps: reconstruct a known truth over a grid of degrees and
//! noise levels, and put the measured errors next to the certificate.

use mzsphere_core::certify::{bound_apriori, find_mz_family, mz_constants, verify_bound, BoundInputs};
use mzsphere_core::filters::MultiplierFilter;
use mzsphere_core::forward::{apply_multiplier, simulate};
use mzsphere_core::geometry::{pick_nodes, EqualAreaPartition, MzFamily, NodeRule};
use mzsphere_core::harmonics::{random_poly, CoefficientVector, SobolevParams};
use mzsphere_core::reconstruct::LsqSolver;

use crate::io::{fmt_f64, Table};
use crate::{CliError, Result};

/// How the sampling family is chosen for each degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    /// One partition of this size for every degree.
    Fixed(usize),
    /// Doubling search per degree until `ε < target`.
    Search { target: f64, max_n: usize },
}

#[derive(Debug, Clone)]
pub struct Sweep {
    /// Needs a decay fit.
    pub filter: MultiplierFilter,
    pub omega: f64,
    pub zeta: f64,
    pub betas: Vec<f64>,
    pub degrees: Vec<usize>,
    pub truth_degree: usize,
    pub seed: u64,
    pub sampling: Sampling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub m: usize,
    pub n: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub measured_l2: f64,
    pub measured_hzeta: f64,
    pub bound_hzeta: f64,
    pub bound_l2: Option<f64>,
    pub pass: bool,
}

/// Unit `H^ω` norm, degree `truth_degree`.
pub fn sweep_truth(s: &Sweep) -> CoefficientVector {
    random_poly(s.truth_degree, SobolevParams { sigma: s.omega }, s.seed, true)
}

fn noise_seed(seed: u64, m: usize, k: usize) -> u64 {
    seed.wrapping_add(1 + ((m as u64) << 16) + k as u64)
}

fn family_for(m: usize, sampling: Sampling) -> Result<(MzFamily, f64)> {
    match sampling {
        Sampling::Fixed(n) => {
            let fam = pick_nodes(&EqualAreaPartition::build(n)?, NodeRule::AreaCenter);
            let eps = mz_constants(&fam, m)?.epsilon;
            Ok((fam, eps))
        }
        Sampling::Search { target, max_n } => {
            let found = find_mz_family(m, NodeRule::AreaCenter, target, max_n)?;
            Ok((found.family, found.constants.epsilon))
        }
    }
}

pub fn run(s: &Sweep) -> Result<Vec<Row>> {
    let fit = s
        .filter
        .decay_fit
        .ok_or_else(|| CliError::Schema("the sweep filter needs a decay fit (gamma)".into()))?;
    let truth = sweep_truth(s);
    let norm_ff = apply_multiplier(&s.filter, &truth)?.sobolev_norm(SobolevParams {
        sigma: s.omega + fit.gamma,
    });
    let norm_f = truth.sobolev_norm(SobolevParams { sigma: s.omega });

    let mut rows = Vec::with_capacity(s.degrees.len() * s.betas.len());
    for &m in &s.degrees {
        let (fam, epsilon) = family_for(m, s.sampling)?;
        let solver = LsqSolver::new(&s.filter, &fam, m)?;
        for (k, &beta) in s.betas.iter().enumerate() {
            let set = simulate(&truth, &s.filter, &fam, beta, noise_seed(s.seed, m, k))?;
            let report = solver.solve(&set.y)?;
            let mut inputs = BoundInputs::sphere(&s.filter, s.omega, s.zeta, epsilon, m, beta)?;
            inputs.norm_ff_sigma = Some(norm_ff);
            inputs.norm_f_omega = Some(norm_f);
            let cert = bound_apriori(inputs)?;
            let v = verify_bound(&truth, &s.filter, &report.solution, &cert)?;
            rows.push(Row {
                m,
                n: fam.len(),
                beta,
                epsilon,
                measured_l2: v.measured_l2,
                measured_hzeta: v.measured_hzeta,
                bound_hzeta: v.bound_hzeta,
                bound_l2: v.bound_l2,
                pass: v.pass(),
            });
        }
    }
    Ok(rows)
}

pub const HEADER: [&str; 7] = ["m", "N", "beta", "measured_L2", "measured_Hzeta", "bound_Hzeta", "bound_L2"];

/// An absent L² bound is left empty.
pub fn to_csv(rows: &[Row]) -> Vec<u8> {
    let mut t = Table::new(&HEADER);
    for r in rows {
        t.row([
            r.m.to_string(),
            r.n.to_string(),
            fmt_f64(r.beta),
            fmt_f64(r.measured_l2),
            fmt_f64(r.measured_hzeta),
            fmt_f64(r.bound_hzeta),
            r.bound_l2.map(fmt_f64).unwrap_or_default(),
        ]);
    }
    t.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use mzsphere_core::filters::{fit_decay, fit_lower};

    fn identity() -> MultiplierFilter {
        let mut f = MultiplierFilter::identity(20);
        fit_decay(&mut f, 0.0).unwrap();
        fit_lower(&mut f, 0.0).unwrap();
        f
    }

    #[test]
    fn small_identity_sweep_is_sound_and_repeatable() {
        let s = Sweep {
            filter: identity(),
            omega: 2.0,
            zeta: 0.0,
            betas: vec![0.0, 1e-2],
            degrees: vec![3, 5],
            truth_degree: 20,
            seed: 11,
            sampling: Sampling::Search {
                target: 0.5,
                max_n: 1 << 16,
            },
        };
        let rows = run(&s).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.pass && r.bound_l2.is_some()));
        assert!(rows.iter().all(|r| r.epsilon < 0.5));
        assert_eq!(to_csv(&rows), to_csv(&run(&s).unwrap()));
        let text = String::from_utf8(to_csv(&rows)).unwrap();
        assert!(text.starts_with("m,N,beta,measured_L2,measured_Hzeta,bound_Hzeta,bound_L2\n"));
    }

    #[test]
    fn fixed_sampling_and_missing_fit() {
        let s = Sweep {
            filter: MultiplierFilter::identity(10),
            omega: 2.0,
            zeta: 0.0,
            betas: vec![0.0],
            degrees: vec![2],
            truth_degree: 10,
            seed: 1,
            sampling: Sampling::Fixed(200),
        };
        assert!(matches!(run(&s), Err(CliError::Schema(_))));
        let rows = run(&Sweep { filter: identity(), ..s }).unwrap();
        assert_eq!(rows[0].n, 200);
    }
}
