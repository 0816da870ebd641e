//! Multiplier sequences `b_m` of zonal convolution filters.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
#[allow(unused_imports)]
use num_traits::Float;

use crate::quadrature::{Adaptive, GaussLegendre};
use crate::special::{self, JacobiParams};
use crate::{Error, Result};

/// Piecewise monotone cubic interpolant on strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl Tabulated {
    /// Abscissae must be strictly increasing and cover `[0, π]`.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                what: "tabulated profile values",
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::InvalidProfile("tabulated profile needs at least two samples".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProfile("abscissae must be strictly increasing".into()));
        }
        if x[0] > 1e-12 || x[x.len() - 1] < PI - 1e-12 {
            return Err(Error::InvalidProfile("abscissae must cover [0, pi]".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("samples must be finite".into()));
        }
        let slope = pchip_slopes(&x, &y);
        Ok(Self { x, y, slope })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.x.len();
        if r <= self.x[0] {
            return self.y[0];
        }
        if r >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = self.x.partition_point(|&v| v <= r) - 1;
        let h = self.x[k + 1] - self.x[k];
        let t = (r - self.x[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.slope[k] + h01 * self.y[k + 1] + h11 * h * self.slope[k + 1]
    }
}

/// Fritsch-Carlson derivative estimates.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut s = vec![0.0; n];
    if n == 2 {
        s[0] = d[0];
        s[1] = d[0];
        return s;
    }
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            s[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let v = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if v * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && v.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            v
        }
    };
    s[0] = end(h[0], h[1], d[0], d[1]);
    s[n - 1] = end(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    s
}

/// Radial profile `h̃₀(r)` of a zonal filter, `r` the distance to the pole.
#[derive(Debug, Clone)]
pub enum RadialProfile {
    /// Indicator of the cap of angular radius `theta0`.
    Cap { theta0: f64 },
    /// Squared Airy-type pattern of a circular aperture.
    Planck { lambda0: f64, r: f64 },
    /// Heavy-tailed point spread function on a body of radius `r` at time `t`.
    Lunar { r: f64, t: f64 },
    Tabulated(Tabulated),
    Constant(f64),
    Analytic(fn(f64) -> f64),
}

impl RadialProfile {
    pub fn cap(theta0: f64) -> Result<Self> {
        if !(theta0 > 0.0 && theta0 <= FRAC_PI_2) {
            return Err(Error::CapAngleOutOfRange(theta0));
        }
        Ok(Self::Cap { theta0 })
    }

    pub fn planck(lambda0: f64, r: f64) -> Result<Self> {
        if !(lambda0 > 0.0 && r > 0.0 && lambda0.is_finite() && r.is_finite()) {
            return Err(Error::InvalidProfile(alloc::format!(
                "planck profile needs lambda0 > 0 and R > 0, got ({lambda0}, {r})"
            )));
        }
        Ok(Self::Planck { lambda0, r })
    }

    pub fn lunar(r: f64, t: f64) -> Result<Self> {
        if !(r > 0.0 && t > 0.0 && r.is_finite() && t.is_finite()) {
            return Err(Error::InvalidProfile(alloc::format!(
                "lunar profile needs R > 0 and t > 0, got ({r}, {t})"
            )));
        }
        Ok(Self::Lunar { r, t })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Cap { theta0 } => {
                if r.abs() <= *theta0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Planck { lambda0, r: radius } => planck(*lambda0, *radius, r),
            Self::Lunar { r: radius, t } => {
                let (sigma, iota) = lunar_shape(*t);
                (1.0 + radius * radius * r * r / (2.0 * sigma * sigma)).powf(-iota - 1.0)
            }
            Self::Tabulated(t) => t.eval(r),
            Self::Constant(c) => *c,
            Self::Analytic(f) => f(r),
        }
    }

    /// Interior points where the profile is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Cap { theta0 } if *theta0 < PI => vec![*theta0],
            _ => Vec::new(),
        }
    }

    fn is_smooth(&self) -> bool {
        !matches!(self, Self::Cap { .. } | Self::Tabulated(_))
    }
}

fn planck(lambda0: f64, radius: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    let z = 4.0 * PI * radius * s;
    let amp = if z.abs() < 1e-4 {
        // J₁(z) ≈ z/2 − z³/16.
        PI * lambda0 * (1.0 - z * z / 8.0)
    } else {
        lambda0 * libm::j1(z) / (2.0 * radius * s)
    };
    amp * amp
}

/// Shape parameters `(σ, ι)` of the lunar profile at time `t`.
pub fn lunar_shape(t: f64) -> (f64, f64) {
    (0.704 * t + 1.39, -4.87e-4 * t + 0.631)
}

fn segments(p: &RadialProfile) -> Vec<(f64, f64)> {
    let mut cuts = vec![0.0];
    cuts.extend(p.breakpoints().into_iter().filter(|&b| b > 0.0 && b < PI));
    cuts.push(PI);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `‖h‖₂ = (∫_0^π g(r)² sin(r)/2 dr)^{1/2}` for the zonal function on S².
pub fn profile_l2_norm(p: &RadialProfile) -> Result<f64> {
    let q = Adaptive::default();
    let mut total = 0.0;
    for (lo, hi) in segments(p) {
        let v = q
            .integrate(lo, hi, 1e-10, 32, |r| {
                let g = p.eval(r);
                g * g * 0.5 * r.sin()
            })
            .map_err(|e| Error::QuadratureNonConvergence { m: 0, estimate: e.error })?;
        total += v;
    }
    Ok(total.max(0.0).sqrt())
}

/// Mean `∫ h dμ` of the zonal function with this profile.
pub fn profile_mean(p: &RadialProfile, params: JacobiParams) -> Result<f64> {
    let q = Adaptive::default();
    let mut total = 0.0;
    for (lo, hi) in segments(p) {
        total += q
            .integrate(lo, hi, 1e-13, 32, |r| p.eval(r) * special::radial_density(r, params))
            .map_err(|e| Error::QuadratureNonConvergence { m: 0, estimate: e.error })?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedFormCap,
    Quadrature,
    Identity,
    Custom,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ClosedFormCap => "closed_form_cap",
            Self::Quadrature => "quadrature",
            Self::Identity => "identity",
            Self::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "closed_form_cap" => Self::ClosedFormCap,
            "quadrature" => Self::Quadrature,
            "identity" => Self::Identity,
            "custom" => Self::Custom,
            _ => return None,
        })
    }
}

/// Upper decay constants: `|b_m| <= c (1 + m(m+1))^{−γ/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub c: f64,
    pub gamma: f64,
}

/// Lower constants: `|b_m| >= c0 (1 + m(m+1))^{−ζ/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerFit {
    pub c0: f64,
    pub zeta: f64,
}

/// Fourier multiplier `F f = Σ b_m Π_m f`, stored for `m <= m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierFilter {
    pub b: Vec<f64>,
    pub provenance: Provenance,
    pub decay_fit: Option<DecayFit>,
    pub lower_fit: Option<LowerFit>,
}

impl MultiplierFilter {
    pub fn identity(m_max: usize) -> Self {
        Self::with(vec![1.0; m_max + 1], Provenance::Identity)
    }

    pub fn custom(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidParameter("multiplier sequence is empty".into()));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("multipliers must be finite".into()));
        }
        Ok(Self::with(b, Provenance::Custom))
    }

    fn with(b: Vec<f64>, provenance: Provenance) -> Self {
        Self {
            b,
            provenance,
            decay_fit: None,
            lower_fit: None,
        }
    }

    pub fn m_max(&self) -> usize {
        self.b.len() - 1
    }

    pub fn get(&self, m: usize) -> Option<f64> {
        self.b.get(m).copied()
    }

    /// Pointwise product of two multiplier sequences, truncated to the shorter.
    pub fn compose(&self, other: &Self) -> Self {
        let b = self.b.iter().zip(&other.b).map(|(x, y)| x * y).collect();
        Self::with(b, Provenance::Custom)
    }
}

fn weight(m: usize, exponent: f64) -> f64 {
    (1.0 + special::lambda_sq(m, JacobiParams::S2)).powf(exponent)
}

/// Closed-form multipliers of the normalized cap indicator on S².
pub fn cap_multipliers(theta0: f64, m_max: usize) -> Result<MultiplierFilter> {
    if !(theta0 > 0.0 && theta0 <= FRAC_PI_2) {
        return Err(Error::CapAngleOutOfRange(theta0));
    }
    let (s, c) = (0.5 * theta0).sin_cos();
    let s2c2 = s * s * c * c;
    let mut p11 = vec![0.0; m_max.max(1)];
    special::jacobi_all(JacobiParams { a: 1.0, b: 1.0 }, theta0.cos(), &mut p11);
    let mut b = Vec::with_capacity(m_max + 1);
    b.push(0.5 * (1.0 - theta0.cos()));
    for m in 1..=m_max {
        b.push(p11[m - 1] * s2c2 / m as f64);
    }
    Ok(MultiplierFilter::with(b, Provenance::ClosedFormCap))
}

/// Gauss-Legendre order used on every panel of the multiplier quadrature.
const PANEL_RULE: usize = 20;
const MAX_DOUBLINGS: u32 = 8;

/// `b_m = ∫_0^π h̃₀(r) P_m(cos r)/P_m(1) A(r) dr` for all `m <= m_max`.
///
/// The base mesh has `max(4 m_max, 32)` panels, cut at the profile's
/// breakpoints, and is doubled until consecutive estimates agree to `tol`.
pub fn multipliers_from_profile(
    p: &RadialProfile,
    params: JacobiParams,
    m_max: usize,
    tol: f64,
) -> Result<MultiplierFilter> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("tolerance must be positive, got {tol}")));
    }
    let rule = GaussLegendre::new(PANEL_RULE);
    let inv_at_one: Vec<f64> = (0..=m_max).map(|m| 1.0 / special::jacobi_at_one(m, params)).collect();
    let segs = segments(p);
    let base = (4 * m_max).max(32);
    let estimate = |panels: usize| {
        let mut acc = vec![0.0; m_max + 1];
        for &(lo, hi) in &segs {
            let n = ((panels as f64 * (hi - lo) / PI).ceil() as usize).max(1);
            let part = rule.composite_vec(lo, hi, n, m_max + 1, |r, out| {
                special::jacobi_all(params, r.cos(), out);
                let w = p.eval(r) * special::radial_density(r, params);
                for (v, s) in out.iter_mut().zip(&inv_at_one) {
                    *v *= w * s;
                }
            });
            acc.iter_mut().zip(part).for_each(|(a, v)| *a += v);
        }
        acc
    };
    let mut panels = base;
    let mut prev = estimate(panels);
    let mut worst = (0, f64::INFINITY);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let next = estimate(panels);
        worst = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .enumerate()
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if worst.1 <= tol {
            return Ok(MultiplierFilter::with(next, Provenance::Quadrature));
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence {
        m: worst.0,
        estimate: worst.1,
    })
}

/// Smallest `c` with `|b_m| <= c (1 + m(m+1))^{−γ/2}` over the stored range.
pub fn fit_decay(f: &mut MultiplierFilter, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("gamma must be non-negative, got {gamma}")));
    }
    let c = f
        .b
        .iter()
        .enumerate()
        .map(|(m, b)| b.abs() * weight(m, 0.5 * gamma))
        .fold(0.0, f64::max);
    f.decay_fit = Some(DecayFit { c, gamma });
    Ok(c)
}

/// Largest `c0` with `|b_m| >= c0 (1 + m(m+1))^{−ζ/2}` over the stored range.
pub fn fit_lower(f: &mut MultiplierFilter, zeta: f64) -> Result<f64> {
    if !(zeta >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("zeta must be non-negative, got {zeta}")));
    }
    let c0 = f
        .b
        .iter()
        .enumerate()
        .map(|(m, b)| b.abs() * weight(m, 0.5 * zeta))
        .fold(f64::INFINITY, f64::min);
    f.lower_fit = Some(LowerFit { c0, zeta });
    Ok(c0)
}

/// Grid size of tabulated Laplacians.
pub const LAPLACIAN_GRID: usize = 4097;

/// Tabulates `(1/A)(A g')'` on a uniform grid of `[0, π]`.
///
/// The profile is extended evenly across both poles, as every smooth zonal
/// function is, so that centred fourth-order stencils reach the endpoints.
pub fn radial_laplacian(p: &RadialProfile, params: JacobiParams) -> Result<RadialProfile> {
    if !p.is_smooth() {
        return Err(Error::InvalidProfile(
            "the radial Laplacian needs a smooth built-in profile".into(),
        ));
    }
    let grid = uniform_grid(LAPLACIAN_GRID);
    let values: Vec<f64> = grid.iter().map(|&r| p.eval(r)).collect();
    let lap = laplacian_on_grid(&values, params);
    Ok(RadialProfile::Tabulated(Tabulated::new(grid, lap)?))
}

fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| PI * k as f64 / (n - 1) as f64).collect()
}

fn laplacian_on_grid(g: &[f64], params: JacobiParams) -> Vec<f64> {
    let n = g.len();
    let h = PI / (n - 1) as f64;
    let at = |k: isize| -> f64 {
        let last = (n - 1) as isize;
        let idx = if k < 0 {
            -k
        } else if k > last {
            2 * last - k
        } else {
            k
        };
        g[idx as usize]
    };
    (0..n as isize)
        .map(|k| {
            let (m2, m1, c, p1, p2) = (at(k - 2), at(k - 1), at(k), at(k + 1), at(k + 2));
            let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
            if k == 0 {
                (2.0 * params.a + 2.0) * d2
            } else if k == n as isize - 1 {
                (2.0 * params.b + 2.0) * d2
            } else {
                let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
                let r = k as f64 * h;
                d2 + special::radial_density_log_derivative(r, params) * d1
            }
        })
        .collect()
}

/// `2^K ‖(−Δ)^K h‖₂ / (1 + m(m+1))^{(4K+1)/4}` on S².
pub fn smoothness_bound(p: &RadialProfile, k: u32, m: usize) -> Result<f64> {
    let norm = if k == 0 {
        profile_l2_norm(p)?
    } else {
        if !p.is_smooth() {
            return Err(Error::InvalidProfile(
                "smoothness bounds with K >= 1 need a smooth built-in profile".into(),
            ));
        }
        let grid = uniform_grid(LAPLACIAN_GRID);
        let mut values: Vec<f64> = grid.iter().map(|&r| p.eval(r)).collect();
        for _ in 0..k {
            values = laplacian_on_grid(&values, JacobiParams::S2);
        }
        profile_l2_norm(&RadialProfile::Tabulated(Tabulated::new(grid, values)?))?
    };
    let kf = k as f64;
    Ok(2f64.powi(k as i32) * norm * weight(m, -(4.0 * kf + 1.0) / 4.0))
}
