//! Real spherical harmonics on S², orthonormal under the probability measure,
//! and coefficient vectors of diffusion polynomials.
//!
//! Coefficients are stored degree-major: the pair `(m, ℓ)` with
//! `1 <= ℓ <= 2m+1` lives at index `m² + ℓ − 1`. Within a degree, `ℓ = 1` is
//! the zonal harmonic, `ℓ = 2k` carries `cos(kφ)` and `ℓ = 2k+1` carries
//! `sin(kφ)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::SpherePoint;
use crate::special::{self, JacobiParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    pub m: usize,
    pub ell: usize,
}

impl HarmonicIndex {
    pub fn new(m: usize, ell: usize) -> Result<Self> {
        if ell == 0 || ell > 2 * m + 1 {
            return Err(Error::InvalidParameter(alloc::format!(
                "order index {ell} out of range for degree {m}"
            )));
        }
        Ok(Self { m, ell })
    }

    pub fn flat(self) -> usize {
        self.m * self.m + self.ell - 1
    }

    pub fn from_flat(i: usize) -> Self {
        let m = i.isqrt();
        Self { m, ell: i - m * m + 1 }
    }
}

/// Number of coefficients up to degree `m_max`, `(m_max+1)²`.
pub const fn dimension(m_max: usize) -> usize {
    (m_max + 1) * (m_max + 1)
}

/// Fills `out[0..(m_max+1)²]` with every basis function at `p`.
///
/// Uses the fully normalized associated Legendre recurrences, which stay
/// bounded well beyond degree 200.
pub fn eval_all(m_max: usize, p: SpherePoint, out: &mut [f64]) {
    let n = dimension(m_max);
    assert!(out.len() >= n, "output buffer too short");
    let (s, x) = p.theta.sin_cos();

    // Fourier factors cos(kφ), sin(kφ) by angle addition.
    let (s1, c1) = p.phi.sin_cos();
    let mut cosk = vec![0.0; m_max + 1];
    let mut sink = vec![0.0; m_max + 1];
    cosk[0] = 1.0;
    for k in 1..=m_max {
        cosk[k] = cosk[k - 1] * c1 - sink[k - 1] * s1;
        sink[k] = sink[k - 1] * c1 + cosk[k - 1] * s1;
    }

    // pmm holds sqrt((2l+1)(l-k)!/(l+k)!) P_l^k at l = k.
    let mut pmm = 1.0;
    for k in 0..=m_max {
        if k > 0 {
            let kf = k as f64;
            pmm *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
        }
        let scale = if k == 0 { 1.0 } else { SQRT_2 };
        let mut write = |l: usize, v: f64| {
            let base = l * l;
            if k == 0 {
                out[base] = v;
            } else {
                out[base + 2 * k - 1] = scale * v * cosk[k];
                out[base + 2 * k] = scale * v * sink[k];
            }
        };
        write(k, pmm);
        if k == m_max {
            break;
        }
        let kf = k as f64;
        let mut p_prev = pmm;
        let mut p_cur = (2.0 * kf + 3.0).sqrt() * x * pmm;
        write(k + 1, p_cur);
        for l in (k + 2)..=m_max {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - kf * kf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - kf * kf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            let p_next = a * (x * p_cur - b * p_prev);
            write(l, p_next);
            p_prev = p_cur;
            p_cur = p_next;
        }
    }
}

pub fn eval_basis(idx: HarmonicIndex, p: SpherePoint) -> f64 {
    let mut buf = vec![0.0; dimension(idx.m)];
    eval_all(idx.m, p, &mut buf);
    buf[idx.flat()]
}

/// `(2m+1) P_m(cos ρ(x, y))`, the reproducing kernel of degree `m`.
pub fn zonal_kernel(m: usize, x: SpherePoint, y: SpherePoint) -> f64 {
    special::zonal_kernel(m, JacobiParams::S2, x.cos_distance(y))
}

/// Sobolev smoothness exponent `σ >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevParams {
    pub sigma: f64,
}

impl SobolevParams {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "Sobolev exponent must be non-negative, got {sigma}"
            )));
        }
        Ok(Self { sigma })
    }
}

/// `(1 + m(m+1))^{σ/2}`.
pub fn sobolev_weight(m: usize, sigma: f64) -> f64 {
    (1.0 + special::lambda_sq(m, JacobiParams::S2)).powf(0.5 * sigma)
}

/// Coefficients of a real diffusion polynomial of degree `≤ m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    m_max: usize,
    coeffs: Vec<f64>,
}

impl CoefficientVector {
    pub fn zeros(m_max: usize) -> Self {
        Self {
            m_max,
            coeffs: vec![0.0; dimension(m_max)],
        }
    }

    pub fn from_vec(m_max: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != dimension(m_max) {
            return Err(Error::LengthMismatch {
                what: "coefficient vector",
                expected: dimension(m_max),
                got: coeffs.len(),
            });
        }
        Ok(Self { m_max, coeffs })
    }

    /// The constant function `value`.
    pub fn constant(m_max: usize, value: f64) -> Self {
        let mut c = Self::zeros(m_max);
        c.coeffs[0] = value;
        c
    }

    pub fn unit(m_max: usize, idx: HarmonicIndex) -> Self {
        let mut c = Self::zeros(m_max);
        c.coeffs[idx.flat()] = 1.0;
        c
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn get(&self, idx: HarmonicIndex) -> f64 {
        self.coeffs.get(idx.flat()).copied().unwrap_or(0.0)
    }

    /// Coefficients of degree `m`.
    pub fn block(&self, m: usize) -> &[f64] {
        &self.coeffs[m * m..(m + 1) * (m + 1)]
    }

    pub fn block_mut(&mut self, m: usize) -> &mut [f64] {
        &mut self.coeffs[m * m..(m + 1) * (m + 1)]
    }

    /// Zero-padded or truncated copy of degree `m_max`.
    pub fn resized(&self, m_max: usize) -> Self {
        let mut out = Self::zeros(m_max);
        let n = dimension(m_max.min(self.m_max));
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// `self − other`, padded to the larger degree.
    pub fn sub(&self, other: &Self) -> Self {
        let m = self.m_max.max(other.m_max);
        let mut out = self.resized(m);
        for (o, v) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o -= v;
        }
        out
    }

    pub fn scale(&mut self, alpha: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= alpha);
    }

    /// ℓ² norm of the coefficients, equal to the L²(μ) norm of the function.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn sobolev_norm(&self, s: SobolevParams) -> f64 {
        sobolev_norm(self, s)
    }

    pub fn eval(&self, p: SpherePoint) -> f64 {
        eval_poly(self, p)
    }
}

pub fn eval_poly(c: &CoefficientVector, p: SpherePoint) -> f64 {
    let mut buf = vec![0.0; dimension(c.m_max)];
    eval_all(c.m_max, p, &mut buf);
    buf.iter().zip(&c.coeffs).map(|(y, a)| y * a).sum()
}

/// `(Σ_{m,ℓ} c_{m,ℓ}² (1 + m(m+1))^σ)^{1/2}`.
pub fn sobolev_norm(c: &CoefficientVector, s: SobolevParams) -> f64 {
    (0..=c.m_max)
        .map(|m| {
            let w = (1.0 + special::lambda_sq(m, JacobiParams::S2)).powf(s.sigma);
            w * c.block(m).iter().map(|v| v * v).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// Orthogonal projection onto the degree-`m` eigenspace.
pub fn project(c: &CoefficientVector, m: usize) -> Result<CoefficientVector> {
    if m > c.m_max {
        return Err(Error::InvalidParameter(alloc::format!(
            "projection degree {m} exceeds m_max = {}",
            c.m_max
        )));
    }
    let mut out = CoefficientVector::zeros(c.m_max);
    out.block_mut(m).copy_from_slice(c.block(m));
    Ok(out)
}

/// Pseudo-random test polynomial. Each degree block points in a random
/// direction and has norm `(1 + m(m+1))^{−σ/2 − 1/2}`, so the `H^σ` norm stays
/// bounded as `m_max` grows. With `unit_norm` the result is rescaled to
/// `‖·‖_{H^σ} = 1`.
pub fn random_poly(m_max: usize, s: SobolevParams, seed: u64, unit_norm: bool) -> CoefficientVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = CoefficientVector::zeros(m_max);
    for m in 0..=m_max {
        let target = (1.0 + special::lambda_sq(m, JacobiParams::S2)).powf(-0.5 * s.sigma - 0.5);
        let block = c.block_mut(m);
        loop {
            for v in block.iter_mut() {
                *v = rng.random_range(-1.0..1.0);
            }
            let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-3 {
                block.iter_mut().for_each(|v| *v *= target / norm);
                break;
            }
        }
    }
    if unit_norm {
        let n = sobolev_norm(&c, s);
        c.scale(1.0 / n);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use core::f64::consts::{PI, TAU};

    fn pts(k: usize, seed: u64) -> Vec<SpherePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..k)
            .map(|_| {
                let z: f64 = rng.random_range(-1.0..1.0);
                SpherePoint {
                    theta: z.acos(),
                    phi: rng.random_range(0.0..TAU),
                }
            })
            .collect()
    }

    #[test]
    fn index_layout() {
        for i in 0..400 {
            let idx = HarmonicIndex::from_flat(i);
            assert!(idx.ell >= 1 && idx.ell <= 2 * idx.m + 1);
            assert_eq!(idx.flat(), i);
        }
        assert!(HarmonicIndex::new(2, 6).is_err());
        assert!(HarmonicIndex::new(2, 0).is_err());
    }

    #[test]
    fn constant_basis_function_is_one() {
        for p in pts(10, 1) {
            assert_eq!(eval_basis(HarmonicIndex { m: 0, ell: 1 }, p), 1.0);
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        let p = SpherePoint { theta: 0.7, phi: 1.9 };
        let (st, ct) = p.theta.sin_cos();
        let s3 = 3f64.sqrt();
        assert!((eval_basis(HarmonicIndex { m: 1, ell: 1 }, p) - s3 * ct).abs() < 1e-14);
        assert!((eval_basis(HarmonicIndex { m: 1, ell: 2 }, p) - s3 * st * p.phi.cos()).abs() < 1e-14);
        assert!((eval_basis(HarmonicIndex { m: 1, ell: 3 }, p) - s3 * st * p.phi.sin()).abs() < 1e-14);
        let p20 = 5f64.sqrt() * (3.0 * ct * ct - 1.0) / 2.0;
        assert!((eval_basis(HarmonicIndex { m: 2, ell: 1 }, p) - p20).abs() < 1e-14);
    }

    #[test]
    fn addition_theorem_on_the_diagonal() {
        let mut buf = vec![0.0; dimension(10)];
        for p in pts(20, 2) {
            eval_all(10, p, &mut buf);
            for m in 0..=10 {
                let s: f64 = buf[m * m..(m + 1) * (m + 1)].iter().map(|v| v * v).sum();
                assert!((s - (2 * m + 1) as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zonal_kernel_values() {
        let x = SpherePoint { theta: 0.4, phi: 2.0 };
        assert!((zonal_kernel(4, x, x) - 9.0).abs() < 1e-12);
        let anti = SpherePoint::from_vector({
            let v = x.to_unit_vector();
            [-v[0], -v[1], -v[2]]
        });
        assert!((zonal_kernel(1, x, anti) + 3.0).abs() < 1e-12);
        let ps = pts(10, 3);
        let mut bx = vec![0.0; dimension(3)];
        let mut by = vec![0.0; dimension(3)];
        for w in ps.windows(2) {
            eval_all(3, w[0], &mut bx);
            eval_all(3, w[1], &mut by);
            let sum: f64 = (9..16).map(|i| bx[i] * by[i]).sum();
            assert!((zonal_kernel(3, w[0], w[1]) - sum).abs() < 1e-10);
        }
    }

    /// Product grid: Gauss-Legendre in cos θ, trapezoid in φ. Exact for
    /// polynomials of degree < 2·nt in z and < nphi in φ.
    fn grid_integral<F: FnMut(SpherePoint) -> f64>(nt: usize, nphi: usize, mut f: F) -> f64 {
        let rule = GaussLegendre::new(nt);
        let mut total = 0.0;
        for (&z, &w) in rule.nodes().iter().zip(rule.weights()) {
            for j in 0..nphi {
                let p = SpherePoint {
                    theta: z.acos(),
                    phi: TAU * j as f64 / nphi as f64,
                };
                total += w / 2.0 / nphi as f64 * f(p);
            }
        }
        total
    }

    #[test]
    fn orthonormality_on_a_product_grid() {
        let n = dimension(8);
        let mut gram = vec![0.0; n * n];
        let mut buf = vec![0.0; n];
        let rule = GaussLegendre::new(12);
        let nphi = 20;
        for (&z, &w) in rule.nodes().iter().zip(rule.weights()) {
            for j in 0..nphi {
                let p = SpherePoint {
                    theta: z.acos(),
                    phi: TAU * j as f64 / nphi as f64,
                };
                eval_all(8, p, &mut buf);
                let wt = w / 2.0 / nphi as f64;
                for a in 0..n {
                    for b in 0..n {
                        gram[a * n + b] += wt * buf[a] * buf[b];
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * n + b] - expect).abs() < 1e-8, "({a},{b})");
            }
        }
    }

    #[test]
    fn parseval() {
        let c = random_poly(10, SobolevParams { sigma: 0.0 }, 4, false);
        let energy = grid_integral(16, 24, |p| c.eval(p).powi(2));
        assert!((energy - c.l2_norm().powi(2)).abs() < 1e-8);
    }

    #[test]
    fn eval_poly_matches_naive_summation() {
        let c = random_poly(5, SobolevParams { sigma: 1.0 }, 5, false);
        for p in pts(10, 6) {
            let mut naive = 0.0;
            for i in 0..dimension(5) {
                naive += c.as_slice()[i] * eval_basis(HarmonicIndex::from_flat(i), p);
            }
            assert!((c.eval(p) - naive).abs() < 1e-12);
        }
        assert!((CoefficientVector::constant(4, 1.0).eval(pts(1, 7)[0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sobolev_norm_examples() {
        let one = CoefficientVector::constant(3, 1.0);
        for sigma in [0.0, 1.5, 4.0] {
            assert_eq!(sobolev_norm(&one, SobolevParams { sigma }), 1.0);
        }
        let c = random_poly(6, SobolevParams { sigma: 0.0 }, 8, false);
        assert!((c.sobolev_norm(SobolevParams { sigma: 0.0 }) - c.l2_norm()).abs() < 1e-15);
        let e = CoefficientVector::unit(2, HarmonicIndex { m: 1, ell: 2 });
        assert!((sobolev_norm(&e, SobolevParams { sigma: 2.0 }) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn projections_decompose() {
        let c = random_poly(5, SobolevParams { sigma: 0.5 }, 9, false);
        let mut sum = CoefficientVector::zeros(5);
        for m in 0..=5 {
            let p = project(&c, m).unwrap();
            for (s, v) in sum.as_mut_slice().iter_mut().zip(p.as_slice()) {
                *s += v;
            }
            let q = project(&c, (m + 1) % 6).unwrap();
            let dot: f64 = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| a * b).sum();
            assert_eq!(dot, 0.0);
        }
        assert_eq!(sum, c);
        assert!(project(&c, 6).is_err());
        let one = CoefficientVector::constant(2, 1.0);
        assert_eq!(project(&one, 0).unwrap(), one);
    }

    #[test]
    fn random_poly_contract() {
        let s = SobolevParams { sigma: 2.0 };
        let a = random_poly(7, s, 11, true);
        assert_eq!(a, random_poly(7, s, 11, true));
        assert_ne!(a, random_poly(7, s, 12, true));
        assert!((a.sobolev_norm(s) - 1.0).abs() < 1e-12);
        let mut last = 0.0;
        for sigma in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let n = a.sobolev_norm(SobolevParams { sigma });
            assert!(n.is_finite() && n >= last);
            last = n;
        }
    }

    #[test]
    fn deep_degrees_stay_finite() {
        let mut buf = vec![0.0; dimension(200)];
        for p in pts(5, 10).into_iter().chain([SpherePoint { theta: 1e-3, phi: 0.2 }]) {
            eval_all(200, p, &mut buf);
            assert!(buf.iter().all(|v| v.is_finite()));
            let s: f64 = buf[200 * 200..].iter().map(|v| v * v).sum();
            assert!((s - 401.0).abs() < 1e-8);
        }
    }

    #[test]
    fn grid_integral_of_constant() {
        assert!((grid_integral(4, 4, |_| 1.0) - 1.0).abs() < 1e-14);
        let _ = PI;
    }
}
