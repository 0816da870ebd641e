use core::f64::consts::{FRAC_PI_2, PI};

use mzsphere_core::filters::{
    cap_multipliers, fit_decay, fit_lower, multipliers_from_profile, profile_l2_norm, profile_mean,
    smoothness_bound, RadialProfile,
};
use mzsphere_core::special::{delta_m, JacobiParams};

fn scaled(m: usize, b: f64, exponent: f64) -> f64 {
    let m = m as f64;
    (1.0 + m * (m + 1.0)).powf(exponent) * b.abs()
}

#[test]
fn cap_closed_form_matches_quadrature() {
    for theta0 in [0.3, 0.7, FRAC_PI_2] {
        let closed = cap_multipliers(theta0, 50).unwrap();
        let quad = multipliers_from_profile(&RadialProfile::cap(theta0).unwrap(), JacobiParams::S2, 50, 1e-12)
            .unwrap();
        for m in 0..=50 {
            assert!((closed.b[m] - quad.b[m]).abs() < 1e-8, "theta0={theta0} m={m}");
        }
    }
}

#[test]
fn cap_sequence_stays_between_its_bounds() {
    let theta0 = 2.0 * PI / 41.0;
    let f = cap_multipliers(theta0, 1400).unwrap();
    let upper = 3f64.powf(0.75) / 2.0 * theta0.sin().sqrt();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for m in 1..=1400 {
        let v = scaled(m, f.b[m], 0.75);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    assert!(lo >= 0.4e-3, "min {lo}");
    assert!(hi <= upper, "max {hi} vs {upper}");
    assert!(f.b[0].abs() <= upper);

    let mut f = f;
    assert!(fit_decay(&mut f, 1.5).unwrap() <= upper);
    assert!(fit_lower(&mut f, 1.5).unwrap() >= 0.4e-3);
}

#[test]
fn published_norm_constants() {
    let cases = [
        (RadialProfile::planck(3.0, 9.0).unwrap(), 1.064, 0.01),
        (RadialProfile::planck(0.1, 1.0).unwrap(), 0.0106, 0.01),
        (RadialProfile::lunar(1737.1, 30.0).unwrap(), 0.0061, 0.02),
    ];
    for (p, expect, rel) in cases {
        let n = profile_l2_norm(&p).unwrap();
        assert!((n - expect).abs() <= rel * expect, "{p:?}: {n}");
    }
}

#[test]
fn constant_term_is_the_profile_mean() {
    let profiles = [
        RadialProfile::cap(0.7).unwrap(),
        RadialProfile::planck(3.0, 9.0).unwrap(),
        RadialProfile::planck(0.1, 1.0).unwrap(),
        RadialProfile::lunar(1737.1, 30.0).unwrap(),
    ];
    for p in &profiles {
        let f = multipliers_from_profile(p, JacobiParams::S2, 4, 1e-13).unwrap();
        let mean = profile_mean(p, JacobiParams::S2).unwrap();
        assert!((f.b[0] - mean).abs() < 1e-10, "{p:?}: {} vs {mean}", f.b[0]);
    }
}

#[test]
fn planck_coefficients_respect_the_smoothness_bound() {
    let p = RadialProfile::planck(3.0, 9.0).unwrap();
    let f = multipliers_from_profile(&p, JacobiParams::S2, 100, 1e-12).unwrap();
    for m in 0..=100 {
        assert!(f.b[m].abs() <= smoothness_bound(&p, 0, m).unwrap(), "m={m}");
    }
    let norm = profile_l2_norm(&p).unwrap();
    assert!(f.b[0].abs() <= norm);

    let q = RadialProfile::planck(0.1, 1.0).unwrap();
    let mut g = multipliers_from_profile(&q, JacobiParams::S2, 60, 1e-12).unwrap();
    let c = fit_decay(&mut g, 0.5).unwrap();
    assert!(c <= profile_l2_norm(&q).unwrap());
    for m in [0, 1, 5, 20, 60] {
        assert!(g.b[m].abs() <= smoothness_bound(&q, 1, m).unwrap(), "m={m}");
    }
}

#[test]
fn cap_energy_is_captured_by_the_first_degrees() {
    for theta0 in [0.7, FRAC_PI_2] {
        let f = cap_multipliers(theta0, 400).unwrap();
        let energy: f64 = (0..=400).map(|m| delta_m(m, JacobiParams::S2) * f.b[m] * f.b[m]).sum();
        let norm2 = profile_l2_norm(&RadialProfile::cap(theta0).unwrap()).unwrap().powi(2);
        assert!((norm2 - 0.5 * (1.0 - theta0.cos())).abs() < 1e-12);
        assert!(energy <= norm2 * (1.0 + 1e-12));
        assert!(norm2 - energy < 0.01 * norm2, "tail {}", (norm2 - energy) / norm2);
    }
}

#[test]
fn general_parameters_keep_the_constant_projector() {
    for params in [JacobiParams::new(1.0, 1.0).unwrap(), JacobiParams::new(1.0, 0.0).unwrap()] {
        let f = multipliers_from_profile(&RadialProfile::Constant(1.0), params, 8, 1e-12).unwrap();
        assert!((f.b[0] - 1.0).abs() < 1e-12);
        assert!(f.b[1..].iter().all(|v| v.abs() < 1e-12));
    }
}
