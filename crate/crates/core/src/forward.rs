//! The data model: apply a multiplier, sample at nodes, add bounded noise.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::filters::MultiplierFilter;
use crate::geometry::{MzFamily, SpherePoint};
use crate::harmonics::{self, CoefficientVector};
use crate::{Error, Result};

/// Identifies the synthetic truth and filter a measurement set came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRef {
    pub truth_digest: String,
    pub filter_digest: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    pub y: Vec<f64>,
    pub beta: f64,
    pub seed: Option<u64>,
    pub truth_ref: Option<TruthRef>,
}

impl MeasurementSet {
    pub fn new(nodes: Vec<SpherePoint>, weights: Vec<f64>, y: Vec<f64>, beta: f64) -> Result<Self> {
        for (what, len) in [("measurement weights", weights.len()), ("measurement values", y.len())] {
            if len != nodes.len() {
                return Err(Error::LengthMismatch {
                    what,
                    expected: nodes.len(),
                    got: len,
                });
            }
        }
        if !(beta >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("noise level must be non-negative, got {beta}")));
        }
        Ok(Self {
            nodes,
            weights,
            y,
            beta,
            seed: None,
            truth_ref: None,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn family(&self) -> Result<MzFamily> {
        MzFamily::new(self.nodes.clone(), self.weights.clone())
    }
}

/// Scales degree block `m` by `b_m`.
pub fn apply_multiplier(f: &MultiplierFilter, c: &CoefficientVector) -> Result<CoefficientVector> {
    if f.m_max() < c.m_max() {
        return Err(Error::FilterTooShort {
            filter: f.m_max(),
            needed: c.m_max(),
        });
    }
    let mut out = c.clone();
    for m in 0..=c.m_max() {
        let b = f.b[m];
        out.block_mut(m).iter_mut().for_each(|v| *v *= b);
    }
    Ok(out)
}

pub fn sample_at(c: &CoefficientVector, nodes: &[SpherePoint]) -> Vec<f64> {
    let mut buf = alloc::vec![0.0; harmonics::dimension(c.m_max())];
    nodes
        .iter()
        .map(|&p| {
            harmonics::eval_all(c.m_max(), p, &mut buf);
            buf.iter().zip(c.as_slice()).map(|(y, a)| y * a).sum()
        })
        .collect()
}

/// Adds i.i.d. noise, uniform on `[−beta, beta]`.
pub fn add_noise(values: &[f64], beta: f64, seed: u64) -> Result<Vec<f64>> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("noise level must be non-negative, got {beta}")));
    }
    if beta == 0.0 {
        return Ok(values.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(values.iter().map(|v| v + rng.random_range(-beta..=beta)).collect())
}

/// `y_j = (F f†)(x_j) + η_j` at the family's nodes.
pub fn simulate(
    truth: &CoefficientVector,
    filt: &MultiplierFilter,
    fam: &MzFamily,
    beta: f64,
    seed: u64,
) -> Result<MeasurementSet> {
    let clean = sample_at(&apply_multiplier(filt, truth)?, &fam.nodes);
    let y = add_noise(&clean, beta, seed)?;
    let mut set = MeasurementSet::new(fam.nodes.clone(), fam.weights.clone(), y, beta)?;
    set.seed = Some(seed);
    set.truth_ref = Some(TruthRef {
        truth_digest: coefficient_digest(truth),
        filter_digest: filter_digest(filt),
    });
    Ok(set)
}

fn digest_f64s(tag: &[u8], header: u64, values: &[f64]) -> String {
    let mut h = Sha256::new();
    h.update(tag);
    h.update(header.to_le_bytes());
    for v in values {
        h.update(v.to_le_bytes());
    }
    let mut s = String::with_capacity(64);
    for byte in h.finalize() {
        let _ = write!(s, "{byte:02x}");
    }
    s
}

/// SHA-256 of the degree and the coefficients' little-endian bytes.
pub fn coefficient_digest(c: &CoefficientVector) -> String {
    digest_f64s(b"coeffs", c.m_max() as u64, c.as_slice())
}

pub fn filter_digest(f: &MultiplierFilter) -> String {
    digest_f64s(b"filter", f.m_max() as u64, &f.b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pick_nodes, EqualAreaPartition, NodeRule};
    use crate::harmonics::{random_poly, HarmonicIndex, SobolevParams};

    fn family(n: usize) -> MzFamily {
        pick_nodes(&EqualAreaPartition::build(n).unwrap(), NodeRule::AreaCenter)
    }

    #[test]
    fn identity_and_mean_filters() {
        let c = random_poly(6, SobolevParams { sigma: 1.0 }, 1, false);
        assert_eq!(apply_multiplier(&MultiplierFilter::identity(6), &c).unwrap(), c);
        let mut b = alloc::vec![0.0; 7];
        b[0] = 1.0;
        let mean = apply_multiplier(&MultiplierFilter::custom(b).unwrap(), &c).unwrap();
        assert_eq!(mean, CoefficientVector::constant(6, c.as_slice()[0]));
        assert!(apply_multiplier(&MultiplierFilter::identity(5), &c).is_err());
    }

    #[test]
    fn filters_compose_pointwise() {
        let c = random_poly(5, SobolevParams { sigma: 0.0 }, 2, false);
        let f = MultiplierFilter::custom((0..6).map(|m| 1.0 / (1.0 + m as f64)).collect()).unwrap();
        let g = MultiplierFilter::custom((0..6).map(|m| (m as f64).cos()).collect()).unwrap();
        let twice = apply_multiplier(&g, &apply_multiplier(&f, &c).unwrap()).unwrap();
        let once = apply_multiplier(&f.compose(&g), &c).unwrap();
        for (a, b) in twice.as_slice().iter().zip(once.as_slice()) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn sampling() {
        let fam = family(60);
        assert!(sample_at(&CoefficientVector::constant(3, 1.0), &fam.nodes).iter().all(|&v| v == 1.0));
        assert!(sample_at(&CoefficientVector::constant(3, 1.0), &[]).is_empty());
        let z = CoefficientVector::unit(1, HarmonicIndex { m: 1, ell: 1 });
        let v = sample_at(&z, &[SpherePoint::north_pole()]);
        assert!((v[0] - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(v[0], z.eval(SpherePoint::north_pole()));
    }

    #[test]
    fn noise_contract() {
        let v: Vec<f64> = (0..500).map(|k| k as f64 * 0.01).collect();
        assert_eq!(add_noise(&v, 0.0, 3).unwrap(), v);
        let y = add_noise(&v, 0.25, 3).unwrap();
        assert_eq!(y, add_noise(&v, 0.25, 3).unwrap());
        assert_ne!(y, add_noise(&v, 0.25, 4).unwrap());
        assert!(y.iter().zip(&v).all(|(a, b)| (a - b).abs() <= 0.25));
        assert!(add_noise(&v, -1.0, 3).is_err());
    }

    #[test]
    fn simulate_records_the_run() {
        let fam = family(100);
        let one = CoefficientVector::constant(4, 1.0);
        let set = simulate(&one, &MultiplierFilter::identity(4), &fam, 0.0, 9).unwrap();
        assert!(set.y.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let r = set.truth_ref.unwrap();
        assert_eq!(r.truth_digest.len(), 64);
        assert_eq!(r.truth_digest, coefficient_digest(&one));
        assert_ne!(r.truth_digest, coefficient_digest(&CoefficientVector::constant(4, 2.0)));
        assert_eq!(set.seed, Some(9));
    }
}
