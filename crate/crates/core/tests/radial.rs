mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::oracle;
use edl::lemmas::{log_sweep, properness, run_lemma_suite};
use edl::radial::{
    apply_a, first_zero, jacobian_w, log_concavity, profile_residual, solve_profile, solve_variation,
    variation_residual, ProfileOptions,
};
use edl::{check_hypothesis_h, Error, Nonlinearity};
use proptest::prelude::*;

fn opts() -> ProfileOptions {
    ProfileOptions::default()
}

#[test]
fn allen_cahn_matches_shooting_oracle() {
    let nl = Nonlinearity::allen_cahn();
    let p = solve_profile(&nl, 0.5, &opts()).unwrap();
    let r = p.r_t.unwrap();
    assert!((r - oracle::ALLEN_CAHN_T_HALF_R).abs() < 1e-9, "{r}");
    let alpha = p.eval(r).unwrap().uprime;
    assert!((alpha - oracle::ALLEN_CAHN_T_HALF_ALPHA).abs() < 1e-8);
    assert_eq!(first_zero(&p).unwrap(), r);
}

#[test]
fn serrin_radius_matches_oracle_and_closed_form() {
    let p = solve_profile(&Nonlinearity::serrin(), 1.0, &opts()).unwrap();
    assert!((p.r_t.unwrap() - oracle::SERRIN_R_1).abs() < 1e-9);
}

#[test]
fn variation_matches_t_difference_oracle() {
    let nl = Nonlinearity::allen_cahn();
    let p = solve_profile(&nl, 0.5, &opts()).unwrap();
    let v = solve_variation(&nl, &p).unwrap();
    let mid = oracle::ALLEN_CAHN_T_HALF_R / 2.0;
    let h = v.eval(mid).unwrap().u;
    assert!((h - oracle::ALLEN_CAHN_H_AT_HALF_R).abs() < 1e-5, "{h}");
    assert_eq!(v.h[0], 1.0);
    assert_eq!(v.hprime[0], 0.0);
    assert!(variation_residual(&nl, &p, &v) < 1e-6);
}

#[test]
fn hemisphere_w_and_log_concavity() {
    let nl = Nonlinearity::linear(2.0);
    let p = solve_profile(&nl, 1.0, &opts()).unwrap();
    let v = solve_variation(&nl, &p).unwrap();
    let w = jacobian_w(&p, &v).unwrap();
    assert!(w.negative);
    assert!((w.w[0] + 1.0).abs() < 1e-12);
    let lc = log_concavity(&p).unwrap();
    for val in &lc.value {
        assert!((val + 1.0).abs() < 1e-7);
    }
    // at the first zero the value is -alpha^2
    let alpha = p.eval(p.r_t.unwrap()).unwrap().uprime;
    assert!((lc.at_first_zero + alpha * alpha).abs() < 1e-10);
}

#[test]
fn log_concavity_at_origin_is_negative() {
    for lambda in [0.5, 1.0, 3.0] {
        let p = solve_profile(&Nonlinearity::linear(lambda), 1.0, &opts()).unwrap();
        let lc = log_concavity(&p).unwrap();
        assert!(lc.at_zero < 0.0);
        assert!((lc.at_zero + lambda / 2.0).abs() < 1e-12);
        assert!(lc.max_value < 0.0);
    }
}

#[test]
fn w_at_origin_is_minus_half_f() {
    let nl = Nonlinearity::allen_cahn();
    for t in [0.25, 0.5, 0.9] {
        let p = solve_profile(&nl, t, &opts()).unwrap();
        let v = solve_variation(&nl, &p).unwrap();
        let w = jacobian_w(&p, &v).unwrap();
        assert!((w.w[0] + 0.5 * nl.f(t)).abs() < 1e-14);
    }
}

#[test]
fn w_negative_over_sweep() {
    for nl in [Nonlinearity::linear(1.0), Nonlinearity::serrin(), Nonlinearity::allen_cahn()] {
        for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
            if nl.label() == "allen-cahn" && t >= 1.0 {
                continue;
            }
            let p = solve_profile(&nl, t, &opts()).unwrap();
            let v = solve_variation(&nl, &p).unwrap();
            assert!(jacobian_w(&p, &v).unwrap().negative, "{} t={t}", nl.label());
        }
    }
}

#[test]
fn lemma_suites_pass_on_builtin_examples() {
    let cases = [
        (Nonlinearity::linear(1.0), log_sweep(0.25, 4.0, 8)),
        (Nonlinearity::serrin(), log_sweep(0.25, 4.0, 8)),
        (Nonlinearity::allen_cahn(), log_sweep(0.05, 0.95, 8)),
    ];
    for (nl, ts) in cases {
        let suite = run_lemma_suite(&nl, &ts, &opts());
        let fails: Vec<_> = suite.failures().map(|c| c.to_string()).collect();
        assert!(fails.is_empty(), "{}: {fails:#?}", nl.label());
    }
}

#[test]
fn lemma_suite_reports_hypothesis_failure() {
    let suite = run_lemma_suite(&Nonlinearity::exponential(), &[1.0, 2.0], &opts());
    let h = suite.checks.iter().find(|c| c.lemma == "hypothesis-H").unwrap();
    assert!(!h.pass && h.worst < 0.0);
    assert!(!suite.all_pass());
}

#[test]
fn properness_diagnostic() {
    for nl in [Nonlinearity::linear(2.0), Nonlinearity::serrin()] {
        let pr = properness(&nl, &[1.0, 10.0, 100.0, 1000.0], &opts()).unwrap();
        assert!(pr.increasing, "{}: {:?}", nl.label(), pr.min_jet_norm);
    }
}

#[test]
fn hypothesis_examples() {
    let lin = check_hypothesis_h(&Nonlinearity::linear(3.0), 0.1, 5.0, 100).unwrap();
    assert!(lin.holds && lin.min_margin.abs() < 1e-12);
    let ac = check_hypothesis_h(&Nonlinearity::allen_cahn(), 0.1, 0.9, 100).unwrap();
    assert!(ac.holds);
    let ex = check_hypothesis_h(&Nonlinearity::exponential(), 1.0, 2.0, 100).unwrap();
    assert!(!ex.holds);
    assert!((ex.min_margin_at - 2.0).abs() < 1e-12);
    assert!((ex.min_margin + 2f64.exp()).abs() < 1e-12);
}

#[test]
fn errors_are_reported() {
    let nl = Nonlinearity::linear(2.0);
    let e = solve_profile(&nl, -1.0, &opts()).unwrap_err();
    assert_eq!(e.to_string(), "invalid input: t must be positive");
    let p = solve_profile(&Nonlinearity::linear(0.01), 1.0, &opts()).unwrap();
    assert!(p.r_t.is_none());
    assert!(matches!(first_zero(&p), Err(Error::NoZero { .. })));
    assert!(matches!(apply_a(|_| 1.0, PI, 16), Err(Error::Domain(_))));
}

#[test]
fn csv_output_is_deterministic() {
    let nl = Nonlinearity::allen_cahn();
    let mut a = Vec::new();
    let mut b = Vec::new();
    solve_profile(&nl, 0.5, &opts()).unwrap().write_csv(&mut a).unwrap();
    solve_profile(&nl, 0.5, &opts()).unwrap().write_csv(&mut b).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().starts_with("rho,U,Uprime,Usecond\n0.0,0.5,"));
}

#[test]
fn concavity_past_the_equator() {
    let nl = Nonlinearity::allen_cahn();
    let p = solve_profile(&nl, 0.9, &opts()).unwrap();
    let r = p.r_t.unwrap();
    assert!(r > FRAC_PI_2);
    for k in 0..p.rho.len() {
        if p.rho[k] >= FRAC_PI_2 && p.rho[k] <= r {
            assert!(p.usecond[k] <= 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn linear_profiles_scale(lambda in 0.3f64..20.0, t in 0.05f64..50.0) {
        let nl = Nonlinearity::linear(lambda);
        let one = solve_profile(&nl, 1.0, &opts()).unwrap();
        let p = solve_profile(&nl, t, &opts()).unwrap();
        for rho in [0.0, 0.3, 0.9 * one.r_t.unwrap_or(2.0)] {
            let (a, b) = (one.eval(rho).unwrap(), p.eval(rho).unwrap());
            prop_assert!((b.u - t * a.u).abs() <= 1e-10 * t.max(1.0));
        }
        prop_assert!((p.r_t.unwrap_or(0.0) - one.r_t.unwrap_or(0.0)).abs() < 1e-9);
    }

    #[test]
    fn initial_conditions_and_residual(t in 0.05f64..0.95) {
        let nl = Nonlinearity::allen_cahn();
        let p = solve_profile(&nl, t, &opts()).unwrap();
        prop_assert_eq!(p.u[0], t);
        prop_assert_eq!(p.uprime[0], 0.0);
        prop_assert!((p.usecond[0] + 0.5 * nl.f(t)).abs() < 1e-14);
        prop_assert!(profile_residual(&nl, &p) < 1e-6);
        let r = p.r_t.unwrap();
        let end = p.eval(r).unwrap();
        prop_assert!(end.u.abs() < 1e-12 && end.uprime < 0.0);
        for k in 1..p.rho.len() {
            if p.rho[k] < r { prop_assert!(p.u[k] > 0.0); }
        }
    }

    #[test]
    fn profiles_increase_in_t(t1 in 0.05f64..0.9, dt in 0.01f64..0.05) {
        let nl = Nonlinearity::allen_cahn();
        let (a, b) = (solve_profile(&nl, t1, &opts()).unwrap(), solve_profile(&nl, t1 + dt, &opts()).unwrap());
        let common = a.r_t.unwrap().min(b.r_t.unwrap());
        prop_assert!(b.r_t.unwrap() >= a.r_t.unwrap());
        for k in 0..200 {
            let rho = common * k as f64 / 200.0;
            prop_assert!(b.eval(rho).unwrap().u > a.eval(rho).unwrap().u);
        }
    }

    #[test]
    fn fprime_matches_differences(x in -2.0f64..2.0) {
        let h = 1e-4;
        for nl in [Nonlinearity::allen_cahn(), Nonlinearity::linear(1.7), Nonlinearity::exponential()] {
            let fd = (nl.f(x + h) - nl.f(x - h)) / (2.0 * h);
            prop_assert!((nl.fprime(x) - fd).abs() <= 1e-6 * (1.0 + nl.fprime(x).abs()));
        }
    }

    #[test]
    fn startup_operator_constant_and_origin(c in -5.0f64..5.0, eps in 0.05f64..2.5, g1 in -3.0f64..3.0) {
        let s = apply_a(|_| c, eps, 256).unwrap();
        for (r, v) in s.rho.iter().zip(&s.value) {
            prop_assert!((v - 2.0 * c * (0.5 * r).cos().ln()).abs() < 1e-8 * (1.0 + c.abs()));
        }
        let s = apply_a(|r| c + g1 * r * r, eps, 256).unwrap();
        prop_assert!((s.second[0] + 0.5 * c).abs() < 1e-14);
        prop_assert_eq!(s.value[0], 0.0);
    }
}
