//! Gauss-Legendre rules, composite panels and adaptive bisection on intervals.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// An `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn composite<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, panels: usize, mut f: F) -> f64 {
        let h = (hi - lo) / panels as f64;
        (0..panels)
            .map(|k| {
                let a = lo + k as f64 * h;
                self.integrate(a, a + h, &mut f)
            })
            .sum()
    }

    /// Composite rule for a vector-valued integrand; `f` writes all components
    /// at `x` into its output slice.
    pub fn composite_vec<F: FnMut(f64, &mut [f64])>(
        &self,
        lo: f64,
        hi: f64,
        panels: usize,
        dim: usize,
        mut f: F,
    ) -> Vec<f64> {
        let mut acc = vec![0.0; dim];
        let mut buf = vec![0.0; dim];
        let h = (hi - lo) / panels as f64;
        for k in 0..panels {
            let a = lo + k as f64 * h;
            for (x, w) in self.mapped(a, a + h) {
                f(x, &mut buf);
                for (s, v) in acc.iter_mut().zip(&buf) {
                    *s += w * v;
                }
            }
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection failed to meet the tolerance within the depth budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotConverged {
    pub estimate: f64,
    pub error: f64,
}

/// Adaptive composite Gauss-Legendre integration.
///
/// The interval is first cut into `base_panels` pieces; each piece is bisected
/// until a 15-point estimate and the sum of its two halves agree to the share
/// of `tol` proportional to the piece's length.
#[derive(Debug, Clone)]
pub struct Adaptive {
    rule: GaussLegendre,
    pub max_depth: u32,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            rule: GaussLegendre::new(15),
            max_depth: 30,
        }
    }
}

impl Adaptive {
    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        lo: f64,
        hi: f64,
        tol: f64,
        base_panels: usize,
        mut f: F,
    ) -> Result<f64, NotConverged> {
        let panels = base_panels.max(1);
        let h = (hi - lo) / panels as f64;
        let mut total = 0.0;
        let mut worst: f64 = 0.0;
        let mut ok = true;
        let coarse: Vec<f64> = (0..panels)
            .map(|k| {
                let a = lo + k as f64 * h;
                self.rule.integrate(a, a + h, &mut f)
            })
            .collect();
        let floor = 8.0 * f64::EPSILON * coarse.iter().map(|v| v.abs()).sum::<f64>();
        for (k, &whole) in coarse.iter().enumerate() {
            let a = lo + k as f64 * h;
            let b = a + h;
            let (v, err, conv) = self.refine(a, b, whole, tol / panels as f64, floor, 0, &mut f);
            total += v;
            worst = worst.max(err);
            ok &= conv;
        }
        if ok {
            Ok(total)
        } else {
            Err(NotConverged {
                estimate: total,
                error: worst,
            })
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        floor: f64,
        depth: u32,
        f: &mut F,
    ) -> (f64, f64, bool) {
        let mid = 0.5 * (a + b);
        let left = self.rule.integrate(a, mid, &mut *f);
        let right = self.rule.integrate(mid, b, &mut *f);
        let err = (left + right - whole).abs();
        if err <= tol.max(floor) {
            return (left + right, err, true);
        }
        if depth >= self.max_depth {
            return (left + right, err, false);
        }
        let (l, el, cl) = self.refine(a, mid, left, 0.5 * tol, floor, depth + 1, f);
        let (r, er, cr) = self.refine(mid, b, right, 0.5 * tol, floor, depth + 1, f);
        (l + r, el.max(er), cl && cr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(8);
        for p in 0..16 {
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(p));
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-14, "degree {p}: {got} vs {exact}");
        }
        assert!((rule.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rules_contain_the_origin() {
        let rule = GaussLegendre::new(7);
        assert!(rule.nodes()[3].abs() < 1e-16);
    }

    #[test]
    fn adaptive_handles_a_kink() {
        let q = Adaptive::default();
        let v = q.integrate(-1.0, 2.0, 1e-12, 1, |x: f64| x.abs()).unwrap();
        assert!((v - 2.5).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let q = Adaptive {
            max_depth: 2,
            ..Adaptive::default()
        };
        let r = q.integrate(0.0, 1.0, 1e-15, 1, |x: f64| (1.0 / (x + 1e-9)).sin());
        assert!(r.is_err());
    }

    #[test]
    fn composite_vec_matches_scalar() {
        let rule = GaussLegendre::new(10);
        let v = rule.composite_vec(0.0, PI, 7, 2, |x, out| {
            out[0] = x.sin();
            out[1] = x.cos() * x.cos();
        });
        assert!((v[0] - 2.0).abs() < 1e-13);
        assert!((v[1] - PI / 2.0).abs() < 1e-13);
    }
}
