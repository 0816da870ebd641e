//! Points on S², the explicit equal-area partition into `N` regions, and
//! node selection for Marcinkiewicz-Zygmund sampling families.
//!
//! The partition splits the sphere into two polar caps of 25 regions each and
//! an odd number `s` of collars in between. Collar `k` holds `ℓ_k` wedges, and
//! collar boundaries are placed so that every region has area exactly `1/N`
//! under the normalized measure.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Regions in each polar cap.
pub const POLAR_WEDGES: usize = 25;
/// Smallest admissible region count.
pub const MIN_REGIONS: usize = 2 * POLAR_WEDGES;

/// A point on the unit sphere in colatitude/longitude coordinates.
fn wrap_angle(x: f64) -> f64 {
    let r = x % TAU;
    if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    /// Colatitude in `[0, π]`.
    pub theta: f64,
    /// Longitude in `[0, 2π)`.
    pub phi: f64,
}

impl SpherePoint {
    /// Builds a point, wrapping the longitude into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "colatitude must lie in [0, pi], got {theta} (phi = {phi})"
            )));
        }
        let mut phi = wrap_angle(phi);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub const fn north_pole() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub const fn south_pole() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    pub fn to_unit_vector(self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Inverse of [`to_unit_vector`](Self::to_unit_vector); the input is
    /// normalized first.
    pub fn from_vector(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = wrap_angle(v[1].atan2(v[0]));
        Self {
            theta,
            phi: if phi >= TAU { 0.0 } else { phi },
        }
    }

    pub fn cos_distance(self, other: Self) -> f64 {
        let a = self.to_unit_vector();
        let b = other.to_unit_vector();
        (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0)
    }
}

/// Great-circle distance in radians, in `[0, π]`.
pub fn geodesic_distance(p: SpherePoint, q: SpherePoint) -> f64 {
    p.cos_distance(q).acos()
}

/// A colatitude band intersected with a longitude wedge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub phi_lo: f64,
    pub phi_hi: f64,
    /// Collar index `k` (0 and `s+1` are the polar caps).
    pub band: usize,
    /// Wedge index `j`, starting at 1.
    pub wedge: usize,
}

impl Region {
    pub fn whole_sphere() -> Self {
        Self {
            theta_lo: 0.0,
            theta_hi: PI,
            phi_lo: 0.0,
            phi_hi: TAU,
            band: 0,
            wedge: 1,
        }
    }

    /// Normalized measure of the region.
    pub fn measure(&self) -> f64 {
        region_measure(self)
    }

    /// Membership test: closed in colatitude, half-open `[lo, hi)` in
    /// longitude except for a wedge ending at `2π`, which is closed.
    pub fn contains(&self, p: SpherePoint) -> bool {
        let in_theta = p.theta >= self.theta_lo && p.theta <= self.theta_hi;
        let in_phi = p.phi >= self.phi_lo && (p.phi < self.phi_hi || self.phi_hi >= TAU);
        in_theta && in_phi
    }

    /// Area-median colatitude and mid longitude.
    pub fn area_center(&self) -> SpherePoint {
        let z = 0.5 * (self.theta_lo.cos() + self.theta_hi.cos());
        SpherePoint {
            theta: z.clamp(-1.0, 1.0).acos(),
            phi: 0.5 * (self.phi_lo + self.phi_hi),
        }
    }

    /// Uniform point (with respect to area) drawn from the region.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> SpherePoint {
        let (z_lo, z_hi) = (self.theta_hi.cos(), self.theta_lo.cos());
        let z = if z_hi > z_lo { rng.random_range(z_lo..z_hi) } else { z_lo };
        let phi = if self.phi_hi > self.phi_lo {
            rng.random_range(self.phi_lo..self.phi_hi)
        } else {
            self.phi_lo
        };
        SpherePoint {
            theta: z.clamp(-1.0, 1.0).acos().clamp(self.theta_lo, self.theta_hi),
            phi,
        }
    }

    fn half_width(&self) -> f64 {
        0.5 * (self.phi_hi - self.phi_lo)
    }

    /// Largest distance from `(theta_c, mid longitude)` to a point of the region.
    fn farthest_from(&self, theta_c: f64) -> f64 {
        let w = self.half_width();
        let (sc, cc) = theta_c.sin_cos();
        // On the meridian edges, cos d(θ) = cc cos θ + sc cos w sin θ.
        let a = cc;
        let b = sc * w.cos();
        let mut min_cos = f64::INFINITY;
        for t in [self.theta_lo, self.theta_hi] {
            min_cos = min_cos.min(a * t.cos() + b * t.sin());
        }
        let alpha = b.atan2(a);
        for t in [alpha + PI, alpha - PI] {
            if t > self.theta_lo && t < self.theta_hi {
                min_cos = min_cos.min(-(a * a + b * b).sqrt());
            }
        }
        min_cos.clamp(-1.0, 1.0).acos()
    }

    /// Radius of the smallest cap centred on the mid meridian that contains
    /// the region.
    pub fn enclosing_cap_radius(&self) -> f64 {
        let f = |t: f64| self.farthest_from(t);
        let t = golden_section(self.theta_lo, self.theta_hi, f);
        f(t)
    }

    fn inscribed_at(&self, theta_c: f64) -> f64 {
        let mut r = (theta_c - self.theta_lo).min(self.theta_hi - theta_c);
        let w = self.half_width();
        if w < PI {
            let edge = if w < 0.5 * PI {
                (theta_c.sin() * w.sin()).clamp(-1.0, 1.0).asin()
            } else {
                theta_c.min(PI - theta_c)
            };
            r = r.min(edge);
        }
        r.max(0.0)
    }

    /// Radius of a cap centred on the mid meridian that fits inside the
    /// region (a lower bound for the largest inscribed cap).
    pub fn inscribed_cap_radius(&self) -> f64 {
        let t = golden_section(self.theta_lo, self.theta_hi, |t| -self.inscribed_at(t));
        self.inscribed_at(t)
    }
}

fn golden_section<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, f: F) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// `(cos θ_lo − cos θ_hi)(φ_hi − φ_lo) / (4π)`.
pub fn region_measure(r: &Region) -> f64 {
    (r.theta_lo.cos() - r.theta_hi.cos()) * (r.phi_hi - r.phi_lo) / (2.0 * TAU)
}

/// Integer rounding of a sequence of non-negative reals with integer total.
///
/// The result keeps the total, stays within `1/2` of the first and last
/// entries and within `1` of the interior ones, and every prefix sum of
/// `y − ℓ` stays within `[-1/2, 1/2]`. With `symmetric` set and `y` an
/// odd-length palindrome, the first half is rounded cumulatively, mirrored,
/// and the middle entry absorbs the remainder; otherwise the whole sequence
/// is rounded cumulatively.
pub fn build_rounding_sequence(y: &[f64], symmetric: bool) -> Result<Vec<i64>> {
    if y.is_empty() {
        return Err(Error::InfeasibleRounding("empty sequence".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InfeasibleRounding("non-finite entry".into()));
    }
    let total: f64 = y.iter().sum();
    let scale = y.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    let target = libm::rint(total);
    if (total - target).abs() > 1e-9 * scale {
        return Err(Error::InfeasibleRounding(format!(
            "total {total} is not an integer"
        )));
    }
    let target = target as i64;
    let n = y.len();
    let palindrome = (0..n / 2).all(|i| (y[i] - y[n - 1 - i]).abs() <= 1e-9 * scale);

    let cumulative = |len: usize| -> Vec<i64> {
        let mut out = Vec::with_capacity(len);
        let mut prefix = 0.0;
        let mut prev = 0i64;
        for &v in &y[..len] {
            prefix += v;
            let r = libm::rint(prefix) as i64;
            out.push(r - prev);
            prev = r;
        }
        out
    };

    let ell = if symmetric && n % 2 == 1 && palindrome {
        let h = n / 2;
        let first = cumulative(h);
        let half_sum: i64 = first.iter().sum();
        let mut ell = first.clone();
        ell.push(target - 2 * half_sum);
        ell.extend(first.iter().rev());
        ell
    } else {
        let mut ell = cumulative(n);
        let sum_but_last: i64 = ell[..n - 1].iter().sum();
        ell[n - 1] = target - sum_but_last;
        ell
    };
    if let Some(bad) = ell.iter().find(|&&v| v < 0) {
        return Err(Error::InfeasibleRounding(format!(
            "rounding produced a negative entry {bad}"
        )));
    }
    Ok(ell)
}

/// Maximal violations of the three rounding properties, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundingCheck {
    /// `|Σ y − Σ ℓ|`.
    pub total_gap: f64,
    /// `max(|y_1 − ℓ_1|, |y_s − ℓ_s|)`, at most 1/2.
    pub end_gap: f64,
    /// Largest `|y_i − ℓ_i|` over interior entries, at most 1.
    pub interior_gap: f64,
    /// Largest `|Σ_{i≤k} (y_i − ℓ_i)|`, at most 1/2.
    pub prefix_gap: f64,
}

impl RoundingCheck {
    pub fn new(y: &[f64], ell: &[i64]) -> Self {
        let n = y.len();
        let diff: Vec<f64> = y.iter().zip(ell).map(|(a, &b)| a - b as f64).collect();
        let mut prefix = 0.0;
        let mut prefix_gap: f64 = 0.0;
        for d in &diff {
            prefix += d;
            prefix_gap = prefix_gap.max(prefix.abs());
        }
        let interior_gap = if n > 2 {
            diff[1..n - 1].iter().fold(0.0f64, |m, d| m.max(d.abs()))
        } else {
            0.0
        };
        Self {
            total_gap: prefix.abs(),
            end_gap: diff[0].abs().max(diff[n - 1].abs()),
            interior_gap,
            prefix_gap,
        }
    }

    /// All properties hold up to `slack` absorbed floating-point error.
    pub fn holds(&self, slack: f64) -> bool {
        self.total_gap <= slack
            && self.end_gap <= 0.5 + slack
            && self.interior_gap <= 1.0 + slack
            && self.prefix_gap <= 0.5 + slack
    }
}

/// Equal-area partition of S² into `N` regions.
#[derive(Debug, Clone)]
pub struct EqualAreaPartition {
    pub n: usize,
    /// Colatitude of the north polar cap boundary, `arccos(1 − 50/N)`.
    pub theta0: f64,
    /// Number of collars between the caps (odd).
    pub s: usize,
    pub delta_theta: f64,
    /// Ideal (real) collar sizes `y_1..y_s`.
    pub y: Vec<f64>,
    /// Region counts `ℓ_0..ℓ_{s+1}`.
    pub ell: Vec<i64>,
    /// Collar boundaries `θ_{-1}, θ_0, .., θ_{s+1}`.
    pub theta_bounds: Vec<f64>,
    pub regions: Vec<Region>,
    /// Largest enclosing-cap radius over all regions.
    pub max_cap_radius: f64,
    /// Smallest inscribed-cap radius over all regions.
    pub min_inscribed_radius: f64,
}

impl EqualAreaPartition {
    pub fn build(n: usize) -> Result<Self> {
        if n < MIN_REGIONS {
            return Err(Error::TooFewRegions(n));
        }
        let nf = n as f64;
        let theta0 = (1.0 - 2.0 * POLAR_WEDGES as f64 / nf).acos();
        let mut s = ((PI * nf).sqrt() / 2.0).floor() as usize;
        if s.is_multiple_of(2) {
            s -= 1;
        }
        let delta_theta = (PI - 2.0 * theta0) / s as f64;
        let primed = |k: usize| -> f64 {
            if k > s {
                PI
            } else {
                theta0 + k as f64 * delta_theta
            }
        };
        let y: Vec<f64> = (1..=s)
            .map(|k| nf * (primed(k - 1).cos() - primed(k).cos()) / 2.0)
            .collect();
        let inner = build_rounding_sequence(&y, true)?;

        let mut ell = Vec::with_capacity(s + 2);
        ell.push(POLAR_WEDGES as i64);
        ell.extend_from_slice(&inner);
        ell.push(POLAR_WEDGES as i64);

        let mut theta_bounds = Vec::with_capacity(s + 3);
        theta_bounds.push(0.0);
        let mut count = 0i64;
        for (k, &l) in ell.iter().enumerate() {
            count += l;
            let t = if k == s + 1 {
                PI
            } else {
                (1.0 - 2.0 * count as f64 / nf).clamp(-1.0, 1.0).acos()
            };
            theta_bounds.push(t);
        }

        let mut regions = Vec::with_capacity(n);
        for (k, &l) in ell.iter().enumerate() {
            let (lo, hi) = (theta_bounds[k], theta_bounds[k + 1]);
            let l = l as usize;
            for j in 1..=l {
                regions.push(Region {
                    theta_lo: lo,
                    theta_hi: hi,
                    phi_lo: TAU * (j - 1) as f64 / l as f64,
                    phi_hi: if j == l { TAU } else { TAU * j as f64 / l as f64 },
                    band: k,
                    wedge: j,
                });
            }
        }
        debug_assert_eq!(regions.len(), n);

        // Regions in one collar are congruent, so one per collar suffices.
        let mut max_cap_radius: f64 = 0.0;
        let mut min_inscribed_radius = f64::INFINITY;
        let mut start = 0;
        for &l in &ell {
            if l > 0 {
                let r = &regions[start];
                max_cap_radius = max_cap_radius.max(r.enclosing_cap_radius());
                min_inscribed_radius = min_inscribed_radius.min(r.inscribed_cap_radius());
            }
            start += l as usize;
        }

        Ok(Self {
            n,
            theta0,
            s,
            delta_theta,
            y,
            ell,
            theta_bounds,
            regions,
            max_cap_radius,
            min_inscribed_radius,
        })
    }

    /// Interior collar counts `ℓ_1..ℓ_s`.
    pub fn collar_counts(&self) -> &[i64] {
        &self.ell[1..=self.s]
    }

    pub fn rounding_check(&self) -> RoundingCheck {
        RoundingCheck::new(&self.y, self.collar_counts())
    }

    /// Empirical `c₄ = max_cap_radius · √N`.
    pub fn enclosing_constant(&self) -> f64 {
        self.max_cap_radius * (self.n as f64).sqrt()
    }

    /// Empirical `c₃ = min_inscribed_radius · √N`.
    pub fn inscribed_constant(&self) -> f64 {
        self.min_inscribed_radius * (self.n as f64).sqrt()
    }

    /// Index of the region containing `p` under the membership convention of
    /// [`Region::contains`] (ties in colatitude go to the northern collar).
    pub fn locate(&self, p: SpherePoint) -> usize {
        let mut start = 0usize;
        let last_nonempty = self.ell.iter().rposition(|&l| l > 0).unwrap_or(0);
        for (k, &l) in self.ell.iter().enumerate() {
            let l = l as usize;
            if l > 0 && (p.theta <= self.theta_bounds[k + 1] || k == last_nonempty) {
                let j = ((p.phi / TAU) * l as f64).floor() as usize;
                return start + j.min(l - 1);
            }
            start += l;
        }
        self.n - 1
    }
}

/// How one node is chosen inside each region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRule {
    AreaCenter,
    RandomInRegion { seed: u64 },
}

/// Frame constants `A <= 1 <= B` of a sampling family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Sampling nodes with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MzFamily {
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    /// Degree for which the frame constants were verified.
    pub degree: Option<usize>,
    pub frame: Option<FrameBounds>,
}

impl MzFamily {
    pub fn new(nodes: Vec<SpherePoint>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch {
                what: "family weights",
                expected: nodes.len(),
                got: weights.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("empty sampling family".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::InvalidParameter(format!("non-positive weight {w}")));
        }
        Ok(Self {
            nodes,
            weights,
            degree: None,
            frame: None,
        })
    }

    /// Equal weights `1/L`.
    pub fn equal_weights(nodes: Vec<SpherePoint>) -> Result<Self> {
        let w = 1.0 / nodes.len().max(1) as f64;
        let weights = vec![w; nodes.len()];
        Self::new(nodes, weights)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Records verified frame constants for degree `m`.
    pub fn certify(&mut self, m: usize, frame: FrameBounds) {
        self.degree = Some(m);
        self.frame = Some(frame);
    }
}

/// One node per region, weighted by the region's measure.
pub fn pick_nodes(p: &EqualAreaPartition, rule: NodeRule) -> MzFamily {
    let nodes: Vec<SpherePoint> = match rule {
        NodeRule::AreaCenter => p.regions.iter().map(Region::area_center).collect(),
        NodeRule::RandomInRegion { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            p.regions.iter().map(|r| r.sample(&mut rng)).collect()
        }
    };
    let weights = p.regions.iter().map(Region::measure).collect();
    MzFamily {
        nodes,
        weights,
        degree: None,
        frame: None,
    }
}
