//! Weighted least squares over `Q_m`, solved with the pseudoinverse.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SVD};
#[allow(unused_imports)]
use num_traits::Float;

use crate::filters::MultiplierFilter;
use crate::geometry::MzFamily;
use crate::harmonics::{self, CoefficientVector};
use crate::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RELATIVE_CUTOFF: f64 = 1e-12;

const REFINE_STEPS: usize = 4;

/// Rows `√τ_j b_{m'} Y_{m'}^ℓ(x_j)` over the active columns.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub matrix: DMatrix<f64>,
    /// Flat harmonic indices of the columns.
    pub active: Vec<usize>,
    pub m: usize,
}

/// Active degrees are those with `b_{m'} != 0`.
pub fn design_matrix(filt: &MultiplierFilter, fam: &MzFamily, m: usize) -> Result<DesignMatrix> {
    if filt.m_max() < m {
        return Err(Error::FilterTooShort {
            filter: filt.m_max(),
            needed: m,
        });
    }
    if fam.is_empty() {
        return Err(Error::InvalidParameter("empty sampling family".into()));
    }
    let active: Vec<usize> = (0..=m)
        .filter(|&d| filt.b[d] != 0.0)
        .flat_map(|d| d * d..(d + 1) * (d + 1))
        .collect();
    if active.is_empty() {
        return Err(Error::NoActiveMultipliers(m));
    }
    let mut matrix = DMatrix::zeros(fam.len(), active.len());
    let mut buf = vec![0.0; harmonics::dimension(m)];
    for (j, (&p, &tau)) in fam.nodes.iter().zip(&fam.weights).enumerate() {
        harmonics::eval_all(m, p, &mut buf);
        let s = tau.sqrt();
        for (col, &i) in active.iter().enumerate() {
            let degree = i.isqrt();
            matrix[(j, col)] = s * filt.b[degree] * buf[i];
        }
    }
    Ok(DesignMatrix { matrix, active, m })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsqReport {
    pub solution: CoefficientVector,
    /// `(Σ_j τ_j |y_j − F p(x_j)|²)^{1/2}` at the minimizer.
    pub residual: f64,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub frame_lower: f64,
    pub frame_upper: f64,
    pub rank: usize,
    pub active_indices: Vec<usize>,
}

impl LsqReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.active_indices.len()
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }
}

/// A factorized design matrix; solves any number of data vectors.
#[derive(Debug, Clone)]
pub struct LsqSolver {
    design: DesignMatrix,
    svd: SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
    sqrt_w: Vec<f64>,
    sorted: Vec<f64>,
    rank: usize,
    cutoff: f64,
}

impl LsqSolver {
    pub fn new(filt: &MultiplierFilter, fam: &MzFamily, m: usize) -> Result<Self> {
        let design = design_matrix(filt, fam, m)?;
        let svd = design
            .matrix
            .clone()
            .try_svd(true, true, f64::EPSILON, 0)
            .ok_or(Error::SvdFailure)?;
        let mut sorted: Vec<f64> = svd.singular_values.iter().copied().collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        // Fewer rows than columns leaves a null space the thin SVD omits.
        sorted.resize(design.active.len(), 0.0);
        let cutoff = RELATIVE_CUTOFF * sorted[0];
        let rank = sorted.iter().filter(|&&s| s > cutoff).count();
        Ok(Self {
            sqrt_w: fam.weights.iter().map(|w| w.sqrt()).collect(),
            design,
            svd,
            sorted,
            rank,
            cutoff,
        })
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    pub fn frame_lower(&self) -> f64 {
        let s = *self.sorted.last().unwrap();
        s * s
    }

    pub fn frame_upper(&self) -> f64 {
        self.sorted[0] * self.sorted[0]
    }

    fn pinv(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let u = self.svd.u.as_ref().ok_or(Error::SvdFailure)?;
        let vt = self.svd.v_t.as_ref().ok_or(Error::SvdFailure)?;
        let mut coef = u.tr_mul(rhs);
        for (c, &s) in coef.iter_mut().zip(self.svd.singular_values.iter()) {
            *c = if s > self.cutoff { *c / s } else { 0.0 };
        }
        Ok(vt.tr_mul(&coef))
    }

    pub fn solve(&self, y: &[f64]) -> Result<LsqReport> {
        if y.len() != self.sqrt_w.len() {
            return Err(Error::LengthMismatch {
                what: "data vector",
                expected: self.sqrt_w.len(),
                got: y.len(),
            });
        }
        let rhs = DVector::from_iterator(y.len(), y.iter().zip(&self.sqrt_w).map(|(v, s)| v * s));
        let mut x = self.pinv(&rhs)?;
        let mut residual_vec = &rhs - &self.design.matrix * &x;
        // The bidiagonal SVD loses a few digits; refinement recovers them.
        for _ in 0..REFINE_STEPS {
            let dx = self.pinv(&residual_vec)?;
            x += &dx;
            residual_vec = &rhs - &self.design.matrix * &x;
            if dx.norm() <= f64::EPSILON * x.norm() {
                break;
            }
        }
        let residual = residual_vec.norm();

        let mut solution = CoefficientVector::zeros(self.design.m);
        for (&i, v) in self.design.active.iter().zip(x.iter()) {
            solution.as_mut_slice()[i] = *v;
        }
        Ok(LsqReport {
            solution,
            residual,
            singular_values: self.sorted.clone(),
            frame_lower: self.frame_lower(),
            frame_upper: self.frame_upper(),
            rank: self.rank,
            active_indices: self.design.active.clone(),
        })
    }
}

/// `argmin_{p ∈ Q_m} Σ_j τ_j |y_j − F p(x_j)|²`, minimum-norm on ties.
pub fn lsq_solve(filt: &MultiplierFilter, fam: &MzFamily, m: usize, y: &[f64]) -> Result<LsqReport> {
    LsqSolver::new(filt, fam, m)?.solve(y)
}

/// Plain sampling: the identity filter.
pub fn reconstruct_direct(fam: &MzFamily, m: usize, y: &[f64]) -> Result<LsqReport> {
    lsq_solve(&MultiplierFilter::identity(m), fam, m, y)
}

/// `(Σ_j τ_j |y_j|²)^{1/2}`.
pub fn weighted_norm(weights: &[f64], y: &[f64]) -> f64 {
    weights.iter().zip(y).map(|(w, v)| w * v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::simulate;
    use crate::geometry::{pick_nodes, EqualAreaPartition, NodeRule};
    use crate::harmonics::{random_poly, HarmonicIndex, SobolevParams};

    fn family(n: usize) -> MzFamily {
        pick_nodes(&EqualAreaPartition::build(n).unwrap(), NodeRule::AreaCenter)
    }

    #[test]
    fn constant_column() {
        let fam = family(80);
        let d = design_matrix(&MultiplierFilter::identity(0), &fam, 0).unwrap();
        assert_eq!(d.matrix.ncols(), 1);
        assert!((d.matrix.column(0).norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inactive_degrees_are_dropped() {
        let fam = family(80);
        let f = MultiplierFilter::custom(vec![1.0, 0.0, 0.5]).unwrap();
        let d = design_matrix(&f, &fam, 2).unwrap();
        assert_eq!(d.active, vec![0, 4, 5, 6, 7, 8]);
        let zero = MultiplierFilter::custom(vec![0.0, 0.0]).unwrap();
        assert_eq!(design_matrix(&zero, &fam, 1).unwrap_err(), Error::NoActiveMultipliers(1));
        assert!(design_matrix(&f, &fam, 3).is_err());
    }

    #[test]
    fn design_matrix_reproduces_samples() {
        let fam = family(120);
        let f = MultiplierFilter::custom(vec![1.0, 0.3, 0.0, 0.1]).unwrap();
        let truth = random_poly(3, SobolevParams { sigma: 1.0 }, 5, false);
        let set = simulate(&truth, &f, &fam, 0.0, 0).unwrap();
        let d = design_matrix(&f, &fam, 3).unwrap();
        let x = DVector::from_iterator(d.active.len(), d.active.iter().map(|&i| truth.as_slice()[i]));
        let got = &d.matrix * x;
        for (j, v) in got.iter().enumerate() {
            assert!((v - fam.weights[j].sqrt() * set.y[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_and_constant_data() {
        let fam = family(100);
        let r = reconstruct_direct(&fam, 3, &vec![0.0; 100]).unwrap();
        assert_eq!(r.solution, CoefficientVector::zeros(3));
        assert_eq!(r.residual, 0.0);
        let r = reconstruct_direct(&fam, 3, &vec![5.0; 100]).unwrap();
        assert!(r.full_rank());
        assert!((r.solution.as_slice()[0] - 5.0).abs() < 1e-10);
        assert!(r.solution.as_slice()[1..].iter().all(|v| v.abs() < 1e-10));
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn underdetermined_systems_return_minimum_norm() {
        let fam = family(50);
        let r = reconstruct_direct(&fam, 8, &vec![1.0; 50]).unwrap();
        assert!(!r.full_rank());
        assert_eq!(r.frame_lower, 0.0);
        assert!(r.residual < 1e-10);
        // The constant 1 interpolates too, so the minimizer can only be shorter.
        assert!(r.solution.l2_norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn exact_recovery_and_the_orthogonality_barrier() {
        let fam = family(400);
        let truth = random_poly(5, SobolevParams { sigma: 1.0 }, 6, false);
        let set = simulate(&truth, &MultiplierFilter::identity(5), &fam, 0.0, 0).unwrap();
        let r = reconstruct_direct(&fam, 5, &set.y).unwrap();
        let err = r.solution.sub(&truth).l2_norm() / truth.l2_norm();
        assert!(err < 1e-9, "{err}");

        let pure = CoefficientVector::unit(6, HarmonicIndex { m: 6, ell: 3 });
        let y = crate::forward::sample_at(&pure, &fam.nodes);
        let r = reconstruct_direct(&fam, 5, &y).unwrap();
        let s = SobolevParams { sigma: 1.0 };
        assert!(r.solution.sub(&pure).sobolev_norm(s) >= pure.sobolev_norm(s));
    }

    #[test]
    fn solver_rejects_wrong_lengths() {
        let fam = family(60);
        assert!(reconstruct_direct(&fam, 2, &[1.0; 3]).is_err());
    }
}
