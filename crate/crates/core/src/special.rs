//! Jacobi polynomials and the spectral data of compact two-point homogeneous
//! spaces: eigenspace dimensions, Laplace-Beltrami eigenvalues and the radial
//! density of the normalized measure.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Jacobi parameters `(a, b)` of a two-point homogeneous space of real
/// dimension `d`: `a = (d - 2)/2`, `b = (d0 - 2)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub a: f64,
    pub b: f64,
}

impl JacobiParams {
    /// The two-sphere, `a = b = 0`.
    pub const S2: Self = Self { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> crate::Result<Self> {
        if !(a >= -0.5 && b >= -0.5) {
            return Err(crate::Error::InvalidParameter(alloc::format!(
                "Jacobi parameters must be >= -1/2, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// Parameters for the sphere `S^d` (where `d0 = d`).
    pub fn sphere(d: usize) -> Self {
        let a = (d as f64 - 2.0) / 2.0;
        Self { a, b: a }
    }

    /// Parameters from the real dimension `d` and the fibre dimension `d0`.
    pub fn from_dims(d: usize, d0: usize) -> Self {
        Self {
            a: (d as f64 - 2.0) / 2.0,
            b: (d0 as f64 - 2.0) / 2.0,
        }
    }
}

/// `P_m^{(a,b)}(x)` by the three-term recurrence in the degree.
pub fn jacobi(m: usize, params: JacobiParams, x: f64) -> f64 {
    let mut out = [0.0; 1];
    let mut it = JacobiIter::new(params, x);
    for _ in 0..=m {
        out[0] = it.next_value();
    }
    out[0]
}

/// Fills `out[k] = P_k^{(a,b)}(x)` for `k = 0..out.len()`.
pub fn jacobi_all(params: JacobiParams, x: f64, out: &mut [f64]) {
    let mut it = JacobiIter::new(params, x);
    for v in out.iter_mut() {
        *v = it.next_value();
    }
}

struct JacobiIter {
    a: f64,
    b: f64,
    x: f64,
    n: usize,
    prev: f64,
    cur: f64,
}

impl JacobiIter {
    fn new(p: JacobiParams, x: f64) -> Self {
        Self {
            a: p.a,
            b: p.b,
            x,
            n: 0,
            prev: 0.0,
            cur: 0.0,
        }
    }

    fn next_value(&mut self) -> f64 {
        let (a, b, x) = (self.a, self.b, self.x);
        let v = match self.n {
            0 => 1.0,
            1 => (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0),
            n => {
                let n = n as f64;
                let s = 2.0 * n + a + b;
                let c1 = 2.0 * n * (n + a + b) * (s - 2.0);
                let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
                let c3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
                (c2 * self.cur - c3 * self.prev) / c1
            }
        };
        self.prev = self.cur;
        self.cur = v;
        self.n += 1;
        v
    }
}

fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `P_m^{(a,b)}(1) = Γ(m+a+1) / (Γ(m+1) Γ(a+1))`.
pub fn jacobi_at_one(m: usize, params: JacobiParams) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let a = params.a;
    if m <= 32 {
        // Exact for integer `a`, and no cancellation either way.
        return (1..=m).map(|i| (a + i as f64) / i as f64).product();
    }
    let m = m as f64;
    (ln_gamma(m + a + 1.0) - ln_gamma(m + 1.0) - ln_gamma(a + 1.0)).exp()
}

/// Dimension `δ_m` of the `m`-th eigenspace.
pub fn delta_m(m: usize, params: JacobiParams) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let JacobiParams { a, b } = params;
    let mf = m as f64;
    let log = ln_gamma(b + 1.0) - ln_gamma(a + 1.0) - ln_gamma(a + b + 2.0)
        + ln_gamma(mf + a + b + 1.0)
        - ln_gamma(mf + b + 1.0)
        + ln_gamma(mf + a + 1.0)
        - ln_gamma(mf + 1.0);
    (2.0 * mf + a + b + 1.0) * log.exp()
}

/// Upper bound `(a+1)/(b+1) (2m+a+b+1) m^{2a}` for `δ_m`, `m >= 1`.
pub fn delta_m_bound(m: usize, params: JacobiParams) -> f64 {
    let JacobiParams { a, b } = params;
    let mf = m as f64;
    (a + 1.0) / (b + 1.0) * (2.0 * mf + a + b + 1.0) * mf.powf(2.0 * a)
}

/// Laplace-Beltrami eigenvalue `λ_m² = m (m + a + b + 1)`.
pub fn lambda_sq(m: usize, params: JacobiParams) -> f64 {
    let mf = m as f64;
    mf * (mf + params.a + params.b + 1.0)
}

/// `c(a,b) = Γ(a+b+2) / (Γ(a+1) Γ(b+1))`.
pub fn density_normalization(params: JacobiParams) -> f64 {
    let JacobiParams { a, b } = params;
    (ln_gamma(a + b + 2.0) - ln_gamma(a + 1.0) - ln_gamma(b + 1.0)).exp()
}

/// Radial density `A(r)` of the normalized measure in geodesic polar
/// coordinates, so that `∫ f dμ = ∫_0^π f_0(r) A(r) dr` for zonal `f`.
pub fn radial_density(r: f64, params: JacobiParams) -> f64 {
    let JacobiParams { a, b } = params;
    density_normalization(params)
        * (0.5 * r).sin().powf(2.0 * a + 1.0)
        * (0.5 * r).cos().powf(2.0 * b + 1.0)
}

/// Logarithmic derivative `A'(r)/A(r)`.
pub fn radial_density_log_derivative(r: f64, params: JacobiParams) -> f64 {
    let JacobiParams { a, b } = params;
    let h = 0.5 * r;
    0.5 * (2.0 * a + 1.0) * h.cos() / h.sin() - 0.5 * (2.0 * b + 1.0) * h.sin() / h.cos()
}

/// Zonal kernel `Z^m(ρ) = δ_m P_m^{(a,b)}(cos ρ) / P_m^{(a,b)}(1)` as a
/// function of the cosine of the geodesic distance.
pub fn zonal_kernel(m: usize, params: JacobiParams, cos_rho: f64) -> f64 {
    delta_m(m, params) * jacobi(m, params, cos_rho) / jacobi_at_one(m, params)
}

/// `Σ_{n<=m} δ_n`, the dimension of the polynomial space of degree `m`.
pub fn polynomial_dimension(m: usize, params: JacobiParams) -> f64 {
    (0..=m).map(|n| delta_m(n, params)).sum()
}

/// Values `P_k^{(a,b)}(x) / P_k^{(a,b)}(1)` for `k = 0..=m_max`.
pub fn normalized_jacobi_all(params: JacobiParams, x: f64, m_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; m_max + 1];
    jacobi_all(params, x, &mut out);
    for (k, v) in out.iter_mut().enumerate() {
        *v /= jacobi_at_one(k, params);
    }
    out
}
