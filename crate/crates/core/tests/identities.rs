use baxter_tq::bethe::{solve_bae, vacuum_state, BetheState};
use baxter_tq::error::Error;
use baxter_tq::hfun::{compute_hpair, HPair};
use baxter_tq::identities::*;
use baxter_tq::params::ModelParams;
use baxter_tq::qseries::{poch_finite, poch_inf};
use baxter_tq::scalar::{cx, rel_diff, C};
use baxter_tq::wronskian::{compute_theta, extract_zeros, ThetaData};

type Z = C<f64>;

fn params(n: usize, s: usize, omega: f64) -> ModelParams<f64> {
    ModelParams::new(cx(0.5, 0.0), cx(0.3, 0.0), cx(omega, 0.0), n, s).unwrap()
}

struct Setup {
    state: BetheState<f64>,
    pair: HPair<f64>,
    theta: ThetaData<f64>,
    probes: Vec<Z>,
}

fn setup(p: ModelParams<f64>, seeds: &[Vec<Z>]) -> Setup {
    let state = solve_bae(&p, seeds).unwrap();
    let pair = compute_hpair(&p, &state.t_coeffs, 64).unwrap();
    let theta = extract_zeros(&compute_theta(&p, &pair).unwrap(), &p).unwrap();
    let mut avoid = state.roots.clone();
    avoid.extend([p.xi, Z::new(1.0, 0.0) / p.xi]);
    avoid.extend(theta.zeros.iter().copied());
    let probes = sample_probes(10, 1, p.q, &avoid);
    Setup { state, pair, theta, probes }
}

fn n2_s1_branch(sign: f64) -> Vec<Z> {
    // x1 = (1 -+ sqrt(omega) xi) / (xi -+ sqrt(omega)) with omega = 0.49
    vec![cx((1.0 - sign * 0.7 * 0.3) / (0.3 - sign * 0.7), 0.0)]
}

#[test]
fn hq_constant_term_and_full_window() {
    let p = params(1, 0, 0.7);
    let s = setup(p, &[]);
    let r = hq_wronskian_check(&s.state, &s.pair, 1e-9).unwrap();
    assert!(r.passed, "max {}", r.max_residual());
    let c0 = r.residuals.iter().find(|(pr, _)| *pr == Probe::Coefficient { line: 1, power: 0 }).unwrap();
    assert!(c0.1 < 1e-15);
    assert_eq!(r.context_value("line1_trust_lo"), Some(&ContextValue::Integer(0)));
}

#[test]
fn hq_for_a_solved_state() {
    for sign in [1.0, -1.0] {
        let s = setup(params(2, 1, 0.49), &[n2_s1_branch(sign)]);
        let r = hq_wronskian_check(&s.state, &s.pair, 1e-8).unwrap();
        assert!(r.passed, "branch {sign}: {}", r.max_residual());
    }
}

#[test]
fn q_reconstruction() {
    let s = setup(params(2, 0, 0.7), &[]);
    let r = reconstruct_q(&s.state, &s.pair, &s.theta, &s.probes, 1e-8).unwrap();
    assert!(r.passed);
    assert_eq!(r.residuals.len(), 10);

    let s = setup(params(1, 1, 0.7), &[vec![cx(-2.0, 0.0)]]);
    assert!((s.state.roots[0] - cx(-1.975, 0.0)).norm() < 1e-10);
    let r = reconstruct_q(&s.state, &s.pair, &s.theta, &s.probes, 1e-7).unwrap();
    assert!(r.passed, "{}", r.max_residual());

    let at_zero = [s.theta.zeros[0]];
    assert!(matches!(
        reconstruct_q(&s.state, &s.pair, &s.theta, &at_zero, 1e-7),
        Err(Error::ProbeAtPole { .. })
    ));
}

#[test]
fn bae2_single_zero_is_vacuous() {
    let s = setup(params(1, 0, 0.7), &[]);
    let r = bae2_check(&s.state, &s.pair, &s.theta, 1e-7).unwrap();
    assert!(r.passed && r.residuals.is_empty());
    assert!(matches!(r.context_value("kappa_prime"), Some(ContextValue::Complex(_))));
}

#[test]
fn bae2_agreement_and_closed_form() {
    let cases = [(params(2, 0, 0.7), vec![]), (params(2, 1, 0.49), vec![n2_s1_branch(1.0)]), (params(3, 2, 0.6), vec![])];
    for (p, seeds) in cases {
        let s = setup(p, &seeds);
        let r = bae2_check(&s.state, &s.pair, &s.theta, 1e-7).unwrap();
        assert!(r.passed, "N={} S={}: {}", p.n, p.s, r.max_residual());
        assert_eq!(r.residuals.len(), p.n * (p.n - 1) / 2);
        let Some(ContextValue::Real(dev)) = r.context_value("kappa_prime_deviation") else { panic!() };
        assert!(*dev < 1e-9, "{dev}");
        let Some(ContextValue::Real(plug)) = r.context_value("bae2_residual") else { panic!() };
        assert!(*plug < 1e-7);
    }
}

#[test]
fn rr_reduces_to_onepsi1_at_n1_s0() {
    let p = params(1, 0, 0.7);
    let s = setup(p, &[]);
    let r = rr_check(&s.state, &s.theta, &s.probes, 320, 1e-8).unwrap();
    assert!(r.passed, "{}", r.max_residual());
    for (probe, value) in &r.values {
        let Probe::Point(x) = probe else { panic!() };
        let single = onepsi1_check(*x / p.xi, *x * p.xi, p.twist(), p.q, 320, 1e-8).unwrap();
        assert!(single.passed);
        assert!(rel_diff(*value, single.values[0].1) < 1e-13);
    }
}

#[test]
fn rr_analytic_state_with_small_budget() {
    let s = setup(params(1, 1, 0.7), &[vec![cx(-2.0, 0.0)]]);
    let r = rr_check(&s.state, &s.theta, &s.probes, 40, 1e-7).unwrap();
    assert!(r.passed, "{}", r.max_residual());
    assert_eq!(r.context_value("k"), Some(&ContextValue::Integer(40)));
}

#[test]
fn rr_gate() {
    let p = params(1, 0, 5.0);
    let s = vacuum_state(&p).unwrap();
    let pair = compute_hpair(&p, &s.t_coeffs, 64).unwrap();
    let theta = extract_zeros(&compute_theta(&p, &pair).unwrap(), &p).unwrap();
    let p2 = ModelParams::new(p.q, cx(0.9, 0.0), cx(3.0, 0.0), 1, 0).unwrap();
    let s2 = vacuum_state(&p2).unwrap();
    // |omega xi| = 2.7 >= 1
    assert!(matches!(rr_check(&s2, &theta, &[cx(1.0, 0.0)], 320, 1e-8), Err(Error::NonConvergentTail { k: 0 })));
}

#[test]
fn onepsi1_terminating_case_against_unilateral_sum() {
    let (a, z, q) = (cx(0.2, 0.0), cx(0.5, 0.0), cx(0.5, 0.0));
    let r = onepsi1_check(a, q, z, q, 320, 1e-10).unwrap();
    assert!(r.passed, "{}", r.max_residual());
    // brute force: sum_{n >= 0} (a;q)_n z^n / (q;q)_n = (az;q)_inf / (z;q)_inf
    let brute: Z = (0..200)
        .map(|n| poch_finite(a, q, n).unwrap() / poch_finite(q, q, n).unwrap() * z.powi(n as i32))
        .sum();
    assert!(rel_diff(brute, poch_inf(a * z, q) / poch_inf(z, q)) < 1e-13);
    assert!(rel_diff(r.values[0].1, brute) < 1e-10);
}

#[test]
fn onepsi1_generic_point_and_region() {
    let q: Z = cx(0.5, 0.0);
    let r = onepsi1_check(cx(0.9, 0.0), cx(0.2, 0.0), cx(0.5, 0.0), q, 60, 1e-9).unwrap();
    assert!(r.passed, "{}", r.max_residual());
    assert!(matches!(
        onepsi1_check(cx(0.9, 0.0), cx(0.2, 0.0), cx(0.1, 0.0), q, 60, 1e-9),
        Err(Error::RegionViolation { .. })
    ));
    assert!(matches!(
        onepsi1_check(cx(0.9, 0.0), cx(0.2, 0.0), cx(1.2, 0.0), q, 60, 1e-9),
        Err(Error::RegionViolation { .. })
    ));
}

#[test]
fn rrgen_unit_weight_functional_equations() {
    let probes = sample_probes(10, 1, cx(0.5, 0.0), &[cx(0.4, 0.0), cx(2.0, 0.0)]);
    // the order (a, b) = (2.0, 0.4) lies outside the convergence region
    let bad = RrgenParams { a: vec![cx(2.0, 0.0)], b: vec![cx(0.4, 0.0)], z: cx(0.3, 0.0), q: cx(0.5, 0.0) };
    assert!(matches!(rrgen_check(&bad, Weight::Unit, &probes, 320, 1e-9), Err(Error::NonConvergentTail { .. })));

    let g = RrgenParams { a: vec![cx(0.4, 0.0)], b: vec![cx(2.0, 0.0)], z: cx(0.3, 0.0), q: cx(0.5, 0.0) };
    let r = rrgen_check(&g, Weight::Unit, &probes, 320, 1e-8).unwrap();
    assert!(r.passed);
    for (probe, res) in &r.residuals {
        match probe {
            Probe::Check { check: 1, .. } => assert!(*res < 1e-9),
            Probe::Check { check: 2, .. } => assert!(*res < 1e-8),
            other => panic!("unexpected probe {other:?}"),
        }
    }
    assert_eq!(r.context_value("f"), Some(&ContextValue::Text("unit".into())));
}

#[test]
fn rrgen_psi_equation_holds_for_a_bethe_weight_off_the_rr_mapping() {
    let s = setup(params(2, 1, 0.49), &[n2_s1_branch(1.0)]);
    let g = RrgenParams { a: vec![cx(0.4, 0.1), cx(0.5, 0.0)], b: vec![cx(2.0, 0.0), cx(1.5, -0.3)], z: cx(0.2, 0.0), q: cx(0.5, 0.0) };
    let r = rrgen_check(&g, Weight::Bethe(&s.state), &s.probes, 320, 1e-8).unwrap();
    let psi_eq = r.residuals.iter().filter(|(p, _)| matches!(p, Probe::Check { check: 1, .. }));
    assert!(psi_eq.clone().count() == 10 && psi_eq.clone().all(|(_, v)| *v < 1e-9));
    assert!(r.context_value("mapping").is_none());
}

#[test]
fn rrgen_bethe_weight_on_the_rr_mapping_matches_both_pathways_bitwise() {
    let p = params(1, 0, 0.7);
    let s = setup(p, &[]);
    let g = RrgenParams::from_model(&p);
    let r = rrgen_check(&g, Weight::Bethe(&s.state), &s.probes, 320, 1e-8).unwrap();
    assert!(r.passed);
    assert!(r.context_value("mapping").is_some());
    for (probe, psi) in &r.values {
        let Probe::Point(x) = probe else { panic!() };
        assert_eq!(*psi, rr_lhs(&s.state, *x, 320).unwrap().value);
        let single = onepsi1_check(*x / g.a[0], *x / g.b[0], g.z, p.q, 320, 1e-8).unwrap();
        assert_eq!(*psi, single.values[0].1);
    }
}

#[test]
fn equivalence_chain_for_enumerated_states() {
    for (n, s, omega) in [(2, 1, 0.49), (3, 1, 0.6), (2, 2, 0.8), (3, 2, 0.6)] {
        let p = params(n, s, omega);
        let states = baxter_tq::bethe::enumerate_states(&p, 40, 9);
        assert!(!states.is_empty());
        for st in states {
            let seeds = [st.roots.clone()];
            let su = setup(p, &seeds);
            assert!(hq_wronskian_check(&su.state, &su.pair, 1e-8).unwrap().passed);
            assert!(reconstruct_q(&su.state, &su.pair, &su.theta, &su.probes, 1e-8).unwrap().passed);
            assert!(bae2_check(&su.state, &su.pair, &su.theta, 1e-7).unwrap().passed);
            assert!(rr_check(&su.state, &su.theta, &su.probes, 320, 1e-7).unwrap().passed);
        }
    }
}
