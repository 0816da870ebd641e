//! Recurrence values against the explicit finite-sum representation,
//! evaluated in exact integer arithmetic.

use mzsphere_core::special::{jacobi, JacobiParams};
use num::{BigInt, BigRational, One, ToPrimitive, Zero};

/// `C(top, k)` for integer `top ≥ 0`.
fn binom(top: i64, k: i64) -> BigInt {
    if k < 0 || k > top {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (top - i) / (i + 1);
    }
    acc
}

/// `P_n^{(a,b)}(k/q)` from `Σ_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^{n-s}`,
/// with the common denominator `(2q)^n` pulled out.
fn jacobi_exact(n: i64, a: i64, b: i64, k: i64, q: i64) -> f64 {
    let xm = BigInt::from(k - q);
    let xp = BigInt::from(k + q);
    let mut sum = BigInt::zero();
    for s in 0..=n {
        let term = binom(n + a, n - s) * binom(n + b, s) * xm.pow(s as u32) * xp.pow((n - s) as u32);
        sum += term;
    }
    BigRational::new(sum, BigInt::from(2 * q).pow(n as u32)).to_f64().unwrap()
}

#[test]
fn single_value_with_unit_parameters() {
    let exact = jacobi_exact(5, 1, 1, 3, 10);
    let got = jacobi(5, JacobiParams::new(1.0, 1.0).unwrap(), 0.3);
    assert!((got - exact).abs() < 1e-12 * exact.abs().max(1.0), "{got} vs {exact}");
}

#[test]
fn recurrence_matches_explicit_sum_on_a_grid() {
    for (a, b) in [(0i64, 0i64), (1, 1), (2, 0)] {
        let params = JacobiParams::new(a as f64, b as f64).unwrap();
        for m in (0..=60).step_by(3).chain([59]) {
            for i in 0..=100 {
                let exact = jacobi_exact(m, a, b, -100 + 2 * i, 100);
                let got = jacobi(m as usize, params, -1.0 + 2.0 * i as f64 / 100.0);
                // Relative error, floored at unit scale near the zeros of P_m.
                let tol = 1e-12 * exact.abs().max(1.0);
                assert!((got - exact).abs() <= tol, "a={a} b={b} m={m} i={i}: {got} vs {exact}");
            }
        }
    }
}
