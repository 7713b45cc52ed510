mod common;

use common::oracle::*;

#[test]
#[ignore = "fine-step oracle run; prints the frozen constants"]
fn print_oracle_values() {
    for h in [2e-6, 1e-6] {
        let r1 = linear_radius(1.0, h).unwrap();
        let ac = shoot(&|x| x - x * x * x, &|x| 1.0 - 3.0 * x * x, 0.5, h, &[], 3.14).unwrap();
        let mid = ac.r_t / 2.0;
        let dt = 1e-4;
        let up = shoot(&|x| x - x * x * x, &|x| 1.0 - 3.0 * x * x, 0.5 + dt, h, &[mid], 3.14).unwrap();
        let dn = shoot(&|x| x - x * x * x, &|x| 1.0 - 3.0 * x * x, 0.5 - dt, h, &[mid], 3.14).unwrap();
        let hmid = (up.samples[0].1 - dn.samples[0].1) / (2.0 * dt);
        let serrin = shoot(&|_| 1.0, &|_| 0.0, 1.0, h, &[], 3.14).unwrap();
        println!("h={h:e}: R_1={r1:?} AC r={:?} alpha={:?} H(r/2)={hmid:?} serrin r={:?}", ac.r_t, ac.alpha, serrin.r_t);
    }
    println!("lambda(R=2.5) = {:?}", lambda_for_radius(2.5, 1e-6));
}

#[test]
fn oracle_agrees_with_frozen_values() {
    let h = 1e-5;
    let r1 = linear_radius(1.0, h).unwrap();
    assert!((r1 - R_LAMBDA_1).abs() < 1e-9, "{r1}");
    let ac = shoot(&|x| x - x * x * x, &|x| 1.0 - 3.0 * x * x, 0.5, h, &[], 3.14).unwrap();
    assert!((ac.r_t - ALLEN_CAHN_T_HALF_R).abs() < 1e-9);
    assert!((ac.alpha - ALLEN_CAHN_T_HALF_ALPHA).abs() < 1e-9);
    let serrin = shoot(&|_| 1.0, &|_| 0.0, 1.0, h, &[], 3.14).unwrap();
    assert!((serrin.r_t - SERRIN_R_1).abs() < 1e-9);
    assert!((SERRIN_R_1 - 2.0 * (-0.5f64).exp().acos()).abs() < 1e-14);
}

#[test]
fn oracle_sweep_values() {
    for (t, r) in ALLEN_CAHN_R_SWEEP {
        let s = shoot(&|x| x - x * x * x, &|x| 1.0 - 3.0 * x * x, t, 1e-5, &[], 3.14).unwrap();
        assert!((s.r_t - r).abs() < 1e-7, "t={t}: {}", s.r_t);
    }
    for (lam, r) in [(0.1, R_LAMBDA_0_1), (100.0, R_LAMBDA_100)] {
        let got = linear_radius(lam, 1e-5).unwrap();
        assert!((got - r).abs() < 1e-8, "lambda={lam}: {got}");
    }
}
