//! JSON shapes of the artifacts, and conversions to and from the core types.

use mzsphere_core::certify::{Certificate, CertifiedFamily, MzConstants, VerifyReport};
use mzsphere_core::filters::{DecayFit, LowerFit, MultiplierFilter, Provenance};
use mzsphere_core::geometry::EqualAreaPartition;
use mzsphere_core::harmonics::{self, CoefficientVector};
use mzsphere_core::reconstruct::LsqReport;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub theta0: f64,
    pub s: usize,
    pub delta_theta: f64,
    pub ell: Vec<i64>,
    pub theta_bounds: Vec<f64>,
    pub max_cap_radius: f64,
    pub min_inscribed_radius: f64,
}

impl From<&EqualAreaPartition> for PartitionJson {
    fn from(p: &EqualAreaPartition) -> Self {
        Self {
            n: p.n,
            theta0: p.theta0,
            s: p.s,
            delta_theta: p.delta_theta,
            ell: p.ell.clone(),
            theta_bounds: p.theta_bounds.clone(),
            max_cap_radius: p.max_cap_radius,
            min_inscribed_radius: p.min_inscribed_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsJson {
    pub m_max: usize,
    pub coeffs: Vec<f64>,
}

impl From<&CoefficientVector> for CoefficientsJson {
    fn from(c: &CoefficientVector) -> Self {
        Self {
            m_max: c.m_max(),
            coeffs: c.as_slice().to_vec(),
        }
    }
}

impl CoefficientsJson {
    pub fn to_core(&self) -> Result<CoefficientVector> {
        if self.coeffs.len() != harmonics::dimension(self.m_max) {
            return Err(CliError::Schema(format!(
                "coefficient array has {} entries, degree {} needs {}",
                self.coeffs.len(),
                self.m_max,
                harmonics::dimension(self.m_max)
            )));
        }
        Ok(CoefficientVector::from_vec(self.m_max, self.coeffs.clone())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayFitJson {
    pub c: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerFitJson {
    pub c0: f64,
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterJson {
    pub m_max: usize,
    pub b: Vec<f64>,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_fit: Option<DecayFitJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_fit: Option<LowerFitJson>,
}

impl From<&MultiplierFilter> for FilterJson {
    fn from(f: &MultiplierFilter) -> Self {
        Self {
            m_max: f.m_max(),
            b: f.b.clone(),
            provenance: f.provenance.as_str().into(),
            decay_fit: f.decay_fit.map(|d| DecayFitJson { c: d.c, gamma: d.gamma }),
            lower_fit: f.lower_fit.map(|l| LowerFitJson { c0: l.c0, zeta: l.zeta }),
        }
    }
}

impl FilterJson {
    pub fn to_core(&self) -> Result<MultiplierFilter> {
        if self.b.len() != self.m_max + 1 {
            return Err(CliError::Schema(format!(
                "filter declares m_max = {} but stores {} multipliers",
                self.m_max,
                self.b.len()
            )));
        }
        let provenance = Provenance::parse(&self.provenance)
            .ok_or_else(|| CliError::Schema(format!("unknown filter provenance '{}'", self.provenance)))?;
        let mut f = MultiplierFilter::custom(self.b.clone())?;
        f.provenance = provenance;
        f.decay_fit = self.decay_fit.map(|d| DecayFit { c: d.c, gamma: d.gamma });
        f.lower_fit = self.lower_fit.map(|l| LowerFit { c0: l.c0, zeta: l.zeta });
        Ok(f)
    }
}

/// Written next to a measurement CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSidecar {
    pub nodes: usize,
    pub beta: f64,
    pub seed: Option<u64>,
    pub truth_digest: Option<String>,
    pub filter_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsqSummary {
    pub rank: usize,
    pub full_rank: bool,
    pub active: usize,
    #[serde(rename = "A")]
    pub frame_lower: f64,
    #[serde(rename = "B")]
    pub frame_upper: f64,
    pub residual: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub m_max: usize,
    pub coeffs: Vec<f64>,
    pub report: LsqSummary,
}

impl From<&LsqReport> for SolutionJson {
    fn from(r: &LsqReport) -> Self {
        Self {
            m_max: r.solution.m_max(),
            coeffs: r.solution.as_slice().to_vec(),
            report: LsqSummary {
                rank: r.rank,
                full_rank: r.full_rank(),
                active: r.active_indices.len(),
                frame_lower: r.frame_lower,
                frame_upper: r.frame_upper,
                residual: r.residual,
                sigma_max: r.sigma_max(),
                sigma_min: r.sigma_min(),
            },
        }
    }
}

impl SolutionJson {
    pub fn coefficients(&self) -> Result<CoefficientVector> {
        CoefficientsJson {
            m_max: self.m_max,
            coeffs: self.coeffs.clone(),
        }
        .to_core()
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyJson {
    pub measured_Hzeta: f64,
    pub measured_L2: f64,
    pub pass_Hzeta: bool,
    pub pass_L2: Option<bool>,
    pub pass: bool,
}

impl From<&VerifyReport> for VerifyJson {
    fn from(v: &VerifyReport) -> Self {
        Self {
            measured_Hzeta: v.measured_hzeta,
            measured_L2: v.measured_l2,
            pass_Hzeta: v.pass_hzeta,
            pass_L2: v.pass_l2,
            pass: v.pass(),
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub d: usize,
    pub d0: usize,
    pub omega: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub zeta: f64,
    pub c: f64,
    pub c0: f64,
    /// Degrees over which `c` and `c0` were fitted.
    pub fit_range: Option<[usize; 2]>,
    pub range_limited: bool,
    pub epsilon: f64,
    pub kappa: f64,
    pub m: usize,
    pub beta: f64,
    pub norm_Ff_sigma: Option<f64>,
    pub norm_f_omega: Option<f64>,
    pub norm_used: f64,
    pub term_approx: f64,
    pub term_noise: f64,
    pub bound_Hzeta: f64,
    pub bound_L2: Option<f64>,
    pub verify: Option<VerifyJson>,
}

impl CertificateJson {
    pub fn new(cert: &Certificate, verify: Option<&VerifyReport>) -> Self {
        let i = &cert.inputs;
        Self {
            d: i.d,
            d0: i.d0,
            omega: i.omega,
            gamma: i.gamma,
            sigma: cert.sigma,
            zeta: i.zeta,
            c: i.c,
            c0: i.c0,
            fit_range: i.fit_range.map(|(lo, hi)| [lo, hi]),
            range_limited: cert.range_limited,
            epsilon: i.epsilon,
            kappa: cert.kappa,
            m: i.m,
            beta: i.beta,
            norm_Ff_sigma: i.norm_ff_sigma,
            norm_f_omega: i.norm_f_omega,
            norm_used: cert.norm_used,
            term_approx: cert.term_approx,
            term_noise: cert.term_noise,
            bound_Hzeta: cert.bound_hzeta,
            bound_L2: cert.bound_l2,
            verify: verify.map(VerifyJson::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MzReportJson {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub epsilon: f64,
    pub kappa: f64,
    /// Present when `N` came from the doubling search.
    pub doublings: Option<u32>,
    /// `N / λ_m²`.
    pub c1: Option<f64>,
}

impl MzReportJson {
    pub fn new(m: usize, n: usize, k: &MzConstants) -> Self {
        Self {
            m,
            n,
            lower: k.lower,
            upper: k.upper,
            epsilon: k.epsilon,
            kappa: k.kappa(),
            doublings: None,
            c1: None,
        }
    }

    pub fn searched(m: usize, fam: &CertifiedFamily) -> Self {
        Self {
            doublings: Some(fam.doublings),
            c1: fam.c1(),
            ..Self::new(m, fam.partition.n, &fam.constants)
        }
    }
}
