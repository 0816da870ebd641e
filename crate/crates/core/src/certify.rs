//! Frame constants, remainder sums and a-priori error certificates.

use alloc::format;
#[allow(unused_imports)]
use num_traits::Float;

use crate::filters::MultiplierFilter;
use crate::forward::apply_multiplier;
use crate::geometry::{pick_nodes, EqualAreaPartition, FrameBounds, MzFamily, NodeRule};
use crate::harmonics::{dimension, CoefficientVector, SobolevParams};
use crate::reconstruct::LsqSolver;
use crate::special::{self, JacobiParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzConstants {
    pub lower: f64,
    pub upper: f64,
    /// `max(1 − A, B − 1)`.
    pub epsilon: f64,
}

impl MzConstants {
    pub fn kappa(&self) -> f64 {
        (1.0 + self.epsilon) / (1.0 - self.epsilon)
    }

    pub fn frame(&self) -> FrameBounds {
        FrameBounds {
            lower: self.lower,
            upper: self.upper,
        }
    }
}

/// Extreme squared singular values of `[√τ_j Y_k(x_j)]` over degrees `<= m`.
pub fn mz_constants(fam: &MzFamily, m: usize) -> Result<MzConstants> {
    let needed = dimension(m);
    if fam.len() < needed {
        return Err(Error::TooFewNodes {
            nodes: fam.len(),
            m,
            needed,
        });
    }
    let solver = LsqSolver::new(&MultiplierFilter::identity(m), fam, m)?;
    let (lower, upper) = (solver.frame_lower(), solver.frame_upper());
    Ok(MzConstants {
        lower,
        upper,
        epsilon: (1.0 - lower).max(upper - 1.0),
    })
}

/// A partition-based family certified for one degree.
#[derive(Debug, Clone)]
pub struct CertifiedFamily {
    pub partition: EqualAreaPartition,
    pub family: MzFamily,
    pub constants: MzConstants,
    /// Number of doublings performed.
    pub doublings: u32,
}

impl CertifiedFamily {
    /// `N / λ_m²`, the empirical constant of `N ≍ λ_m²`.
    pub fn c1(&self) -> Option<f64> {
        let m = self.family.degree?;
        (m > 0).then(|| self.partition.n as f64 / special::lambda_sq(m, JacobiParams::S2))
    }
}

/// Doubles `N` from `max(50, 2(m+1)²)` until `ε < target`.
pub fn find_mz_family(m: usize, rule: NodeRule, target: f64, max_n: usize) -> Result<CertifiedFamily> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!("target epsilon must lie in (0, 1), got {target}")));
    }
    let mut n = (2 * dimension(m)).max(crate::geometry::MIN_REGIONS);
    let mut doublings = 0;
    loop {
        let partition = EqualAreaPartition::build(n)?;
        let mut family = pick_nodes(&partition, rule);
        let constants = mz_constants(&family, m)?;
        if constants.epsilon < target {
            family.certify(m, constants.frame());
            return Ok(CertifiedFamily {
                partition,
                family,
                constants,
                doublings,
            });
        }
        if 2 * n > max_n {
            return Err(Error::Hypothesis(format!(
                "no partition with N <= {max_n} reaches epsilon < {target} at degree {m} (last epsilon {:.3e} at N = {n})",
                constants.epsilon
            )));
        }
        n *= 2;
        doublings += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    ExactSum,
    ClosedBound,
}

fn tail_term(n: f64, s: f64) -> f64 {
    (2.0 * n + 1.0) * (1.0 + n * (n + 1.0)).powf(-s)
}

/// Direct terms summed before the Euler-Maclaurin tail takes over.
const DIRECT_TERMS: usize = 20_000;

/// `Σ_{n>m} (2n+1)(1 + n(n+1))^{−s}` or its integral bound
/// `(1/(s−1)) (1 + m(m+1))^{−(s−1)}`.
pub fn phi_tail(s: f64, m: usize, mode: TailMode) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::InvalidParameter(format!("remainder exponent must exceed 1, got {s}")));
    }
    let closed = |n: f64| (1.0 + n * (n + 1.0)).powf(1.0 - s) / (s - 1.0);
    match mode {
        TailMode::ClosedBound => Ok(closed(m as f64)),
        TailMode::ExactSum => {
            let last = m + DIRECT_TERMS;
            let mut sum = 0.0;
            // Smallest terms first.
            for n in (m + 1..=last).rev() {
                sum += tail_term(n as f64, s);
            }
            let x = last as f64;
            let u = 1.0 + x * (x + 1.0);
            let d1 = 2.0 * u.powf(-s) - s * (2.0 * x + 1.0).powi(2) * u.powf(-s - 1.0);
            Ok(sum + closed(x) - 0.5 * tail_term(x, s) - d1 / 12.0)
        }
    }
}

/// `m = ⌈β^{−1/(ω+γ−d/2)}⌉`.
pub fn choose_degree(beta: f64, omega: f64, gamma: f64, d: usize) -> Result<usize> {
    let e = omega + gamma - 0.5 * d as f64;
    if !(e > 0.0) {
        return Err(Error::Hypothesis(format!("omega + gamma - d/2 must be positive, got {e}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise level must be positive, got {beta}")));
    }
    let x = beta.powf(-1.0 / e);
    let r = x.round();
    let x = if (x - r).abs() <= 1e-12 * x.max(1.0) { r } else { x };
    Ok((x.ceil() as usize).max(1))
}

/// Exponent `1 − ζ/(ω+γ−d/2)` of the balanced error `β^{…}`.
pub fn predicted_rate(omega: f64, gamma: f64, zeta: f64, d: usize) -> f64 {
    1.0 - zeta / (omega + gamma - 0.5 * d as f64)
}

/// Everything a certificate is computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub d: usize,
    pub d0: usize,
    pub omega: f64,
    pub gamma: f64,
    pub zeta: f64,
    /// Upper multiplier constant.
    pub c: f64,
    /// Lower multiplier constant; `0` when unknown.
    pub c0: f64,
    /// Degrees over which `c` and `c0` were fitted.
    pub fit_range: Option<(usize, usize)>,
    pub epsilon: f64,
    pub m: usize,
    pub beta: f64,
    /// `‖F f†‖_{H^σ}` computed from known coefficients.
    pub norm_ff_sigma: Option<f64>,
    /// `‖f†‖_{H^ω}`, used through `‖F f†‖_{H^σ} <= c ‖f†‖_{H^ω}`.
    pub norm_f_omega: Option<f64>,
}

impl BoundInputs {
    /// S² inputs with the filter constants taken from `filter`'s fits.
    pub fn sphere(filter: &MultiplierFilter, omega: f64, zeta: f64, epsilon: f64, m: usize, beta: f64) -> Result<Self> {
        let fit = filter
            .decay_fit
            .ok_or_else(|| Error::Hypothesis("filter has no decay fit (c, gamma)".into()))?;
        let c0 = match filter.lower_fit {
            Some(l) if l.zeta <= zeta => l.c0,
            _ => 0.0,
        };
        Ok(Self {
            d: 2,
            d0: 2,
            omega,
            gamma: fit.gamma,
            zeta,
            c: fit.c,
            c0,
            fit_range: Some((0, filter.m_max())),
            epsilon,
            m,
            beta,
            norm_ff_sigma: None,
            norm_f_omega: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub inputs: BoundInputs,
    pub sigma: f64,
    pub kappa: f64,
    /// The value of `‖F f†‖_{H^σ}` entering the bound.
    pub norm_used: f64,
    pub term_approx: f64,
    pub term_noise: f64,
    pub bound_hzeta: f64,
    pub bound_l2: Option<f64>,
    /// Set when `m` lies beyond the fitted degree range.
    pub range_limited: bool,
}

/// The two-term bound on `‖F f† − F p_m^β‖_{H^ζ}`, and on `‖f† − p_m^β‖₂`
/// when `c0 > 0` and `ζ >= γ`.
pub fn bound_apriori(inp: BoundInputs) -> Result<Certificate> {
    let d = inp.d as f64;
    let sigma = inp.omega + inp.gamma;
    for (name, v) in [("omega", inp.omega), ("gamma", inp.gamma), ("zeta", inp.zeta), ("beta", inp.beta)] {
        if !(v >= 0.0) {
            return Err(Error::Hypothesis(format!("{name} >= 0 (got {v})")));
        }
    }
    if !(sigma - inp.zeta > 0.5 * d) {
        return Err(Error::Hypothesis(format!(
            "sigma - zeta > d/2 (sigma = {sigma}, zeta = {}, d = {})",
            inp.zeta, inp.d
        )));
    }
    if !(inp.epsilon >= 0.0 && inp.epsilon < 1.0) {
        return Err(Error::Hypothesis(format!("0 <= epsilon < 1 (got {})", inp.epsilon)));
    }
    let norm_used = match (inp.norm_ff_sigma, inp.norm_f_omega) {
        (Some(n), _) => n,
        (None, Some(n)) => inp.c * n,
        (None, None) => {
            return Err(Error::InvalidParameter(
                "either ||F f||_{H^sigma} or ||f||_{H^omega} is required".into(),
            ))
        }
    };
    let kappa = (1.0 + inp.epsilon) / (1.0 - inp.epsilon);
    let lam = 1.0 + special::lambda_sq(inp.m, JacobiParams::from_dims(inp.d, inp.d0));
    let ratio = inp.d as f64 / inp.d0 as f64;
    let gap = sigma - inp.zeta - 0.5 * d;
    let term_approx =
        ((1.0 + kappa) * ratio / gap).sqrt() * norm_used * lam.powf(-0.5 * (sigma - inp.zeta) + 0.25 * d);
    let term_noise = kappa.sqrt() * inp.beta * lam.powf(0.5 * inp.zeta);
    let bound_hzeta = term_approx + term_noise;
    let bound_l2 = (inp.c0 > 0.0 && inp.zeta >= inp.gamma).then(|| bound_hzeta / inp.c0);
    Ok(Certificate {
        inputs: inp,
        sigma,
        kappa,
        norm_used,
        term_approx,
        term_noise,
        bound_hzeta,
        bound_l2,
        range_limited: inp.fit_range.is_some_and(|(_, hi)| inp.m > hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub measured_hzeta: f64,
    pub measured_l2: f64,
    pub bound_hzeta: f64,
    pub bound_l2: Option<f64>,
    pub pass_hzeta: bool,
    pub pass_l2: Option<bool>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.pass_hzeta && self.pass_l2.unwrap_or(true)
    }
}

/// Measures the actual errors of `solution` against a known `truth`.
pub fn verify_bound(
    truth: &CoefficientVector,
    filter: &MultiplierFilter,
    solution: &CoefficientVector,
    cert: &Certificate,
) -> Result<VerifyReport> {
    let err = solution.sub(truth);
    let measured_l2 = err.l2_norm();
    let measured_hzeta = apply_multiplier(filter, &err)?.sobolev_norm(SobolevParams {
        sigma: cert.inputs.zeta,
    });
    Ok(VerifyReport {
        measured_hzeta,
        measured_l2,
        bound_hzeta: cert.bound_hzeta,
        bound_l2: cert.bound_l2,
        pass_hzeta: measured_hzeta <= cert.bound_hzeta,
        pass_l2: cert.bound_l2.map(|b| measured_l2 <= b),
    })
}
