use core::f64::consts::PI;

use mzsphere_core::certify::{bound_apriori, choose_degree, find_mz_family, verify_bound, BoundInputs};
use mzsphere_core::filters::{cap_multipliers, fit_decay, fit_lower, MultiplierFilter};
use mzsphere_core::forward::{apply_multiplier, simulate};
use mzsphere_core::geometry::NodeRule;
use mzsphere_core::harmonics::{random_poly, SobolevParams};
use mzsphere_core::reconstruct::lsq_solve;

fn cap_filter() -> MultiplierFilter {
    let mut f = cap_multipliers(2.0 * PI / 41.0, 1400).unwrap();
    fit_decay(&mut f, 1.5).unwrap();
    fit_lower(&mut f, 1.5).unwrap();
    f
}

#[test]
fn noiseless_polynomials_are_recovered() {
    let cap = cap_filter();
    for m in [0, 2, 5, 8] {
        let fam = find_mz_family(m, NodeRule::AreaCenter, 0.5, 1 << 15).unwrap().family;
        for f in [MultiplierFilter::identity(m), cap.clone()] {
            let truth = random_poly(m, SobolevParams { sigma: 1.0 }, 100 + m as u64, false);
            let set = simulate(&truth, &f, &fam, 0.0, 0).unwrap();
            let r = lsq_solve(&f, &fam, m, &set.y).unwrap();
            assert!(r.full_rank());
            let err = r.solution.sub(&truth).l2_norm() / truth.l2_norm();
            assert!(err <= 1e-9, "m={m} {:?}: {err}", f.provenance);
        }
    }
}

fn run(f: &MultiplierFilter, omega: f64, zeta: f64, beta: f64, m: usize) -> mzsphere_core::certify::VerifyReport {
    let truth = random_poly(40, SobolevParams { sigma: omega }, 7, true);
    let fam = find_mz_family(m, NodeRule::AreaCenter, 0.5, 1 << 15).unwrap();
    let set = simulate(&truth, f, &fam.family, beta, 99).unwrap();
    let r = lsq_solve(f, &fam.family, m, &set.y).unwrap();
    let mut inp = BoundInputs::sphere(f, omega, zeta, fam.constants.epsilon, m, beta).unwrap();
    let gamma = inp.gamma;
    inp.norm_ff_sigma = Some(
        apply_multiplier(f, &truth)
            .unwrap()
            .sobolev_norm(SobolevParams { sigma: omega + gamma }),
    );
    let cert = bound_apriori(inp).unwrap();
    verify_bound(&truth, f, &r.solution, &cert).unwrap()
}

#[test]
fn certificates_hold_for_sampling_and_deconvolution() {
    let mut id = MultiplierFilter::identity(1400);
    fit_decay(&mut id, 0.0).unwrap();
    fit_lower(&mut id, 0.0).unwrap();
    let v = run(&id, 2.0, 0.0, 1e-3, 8);
    assert!(v.pass() && v.pass_l2 == Some(true), "{v:?}");

    let cap = cap_filter();
    let m = choose_degree(1e-3, 2.0, 1.5, 2).unwrap();
    let v = run(&cap, 2.0, 1.5, 1e-3, m);
    assert!(v.pass_hzeta && v.pass_l2 == Some(true), "m={m}: {v:?}");
}

#[test]
fn exact_data_in_the_model_space_gives_vanishing_error() {
    let mut id = MultiplierFilter::identity(10);
    fit_decay(&mut id, 0.0).unwrap();
    let truth = random_poly(6, SobolevParams { sigma: 2.0 }, 3, true);
    let fam = find_mz_family(6, NodeRule::AreaCenter, 0.5, 1 << 15).unwrap();
    let set = simulate(&truth, &id, &fam.family, 0.0, 0).unwrap();
    let r = lsq_solve(&id, &fam.family, 6, &set.y).unwrap();
    let mut inp = BoundInputs::sphere(&id, 2.0, 0.0, fam.constants.epsilon, 6, 0.0).unwrap();
    inp.norm_f_omega = Some(1.0);
    let cert = bound_apriori(inp).unwrap();
    let v = verify_bound(&truth.resized(10), &id, &r.solution.resized(10), &cert).unwrap();
    assert!(v.measured_l2 < 1e-10 && v.pass());
}
