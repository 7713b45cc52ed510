//! Regularized startup near the singular point `ρ = 0`.
//!
//! An even solution of `U'' + (cot ρ)U' + g = 0` with `U(0) = 0` is
//! `A(g)(ρ) = −∫₀^ρ (1/sin s) ∫₀^s (sin x) g(x) dx ds`. Both integrands are
//! odd in their variable, which lets the cumulative rule below use the
//! mirrored sample at `−h` on the first cell.

use crate::error::{Error, Result};

/// Samples of `A(g)` and its first two derivatives on a uniform grid of `[0, ε]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StartupSample {
    pub rho: Vec<f64>,
    pub value: Vec<f64>,
    pub deriv: Vec<f64>,
    pub second: Vec<f64>,
}

/// Cumulative integral `∫₀^{x_i} y` of an odd function sampled at
/// `x_i = i h`, `i = 0..=n`, with a fourth-order four-point rule.
fn cumulative_odd(ys: &[f64], h: f64) -> Vec<f64> {
    let n = ys.len() - 1;
    debug_assert!(n >= 3);
    let mut out = vec![0.0; n + 1];
    for i in 0..n {
        let cell = if i == 0 {
            // y(-h) = -y(h)
            h / 24.0 * (ys[1] + 13.0 * ys[0] + 13.0 * ys[1] - ys[2])
        } else if i + 2 <= n {
            h / 24.0 * (-ys[i - 1] + 13.0 * ys[i] + 13.0 * ys[i + 1] - ys[i + 2])
        } else {
            h / 24.0 * (ys[i - 2] - 5.0 * ys[i - 1] + 19.0 * ys[i] + 9.0 * ys[i + 1])
        };
        out[i + 1] = out[i] + cell;
    }
    out
}

/// `A(g)` from samples of `g` on the uniform grid `rho` (which starts at 0).
pub(crate) fn apply_a_sampled(rho: &[f64], g: &[f64]) -> StartupSample {
    let n = rho.len() - 1;
    let h = rho[n] / n as f64;
    let inner: Vec<f64> = rho.iter().zip(g).map(|(r, gv)| r.sin() * gv).collect();
    let big_i = cumulative_odd(&inner, h);
    let deriv: Vec<f64> = rho
        .iter()
        .zip(&big_i)
        .map(|(&r, &i)| if r == 0.0 { 0.0 } else { -i / r.sin() })
        .collect();
    let value = cumulative_odd(&deriv, h);
    let second = rho
        .iter()
        .zip(deriv.iter().zip(g))
        .map(|(&r, (&d, &gv))| {
            if r == 0.0 {
                -0.5 * gv
            } else {
                -d / r.tan() - gv
            }
        })
        .collect();
    StartupSample {
        rho: rho.to_vec(),
        value,
        deriv,
        second,
    }
}

pub(crate) fn uniform_grid(eps: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| eps * i as f64 / n as f64).collect()
}

/// Evaluate `A(g)` on `n + 1` uniform samples of `[0, ε]` by nested quadrature.
pub fn apply_a<G: Fn(f64) -> f64>(g: G, eps: f64, n: usize) -> Result<StartupSample> {
    if !(eps > 0.0 && eps < std::f64::consts::PI) {
        return Err(Error::Domain(format!("startup radius must lie in (0, pi), got {eps}")));
    }
    if n < 3 {
        return Err(Error::InvalidInput("apply_a needs at least 3 cells".into()));
    }
    let rho = uniform_grid(eps, n);
    let gs: Vec<f64> = rho.iter().map(|&r| g(r)).collect();
    if let Some(k) = gs.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("g is not finite at rho = {}", rho[k])));
    }
    Ok(apply_a_sampled(&rho, &gs))
}

/// `2 |ln cos(ε/2)|`, the operator-norm bound of `A` on `C([0, ε])`.
pub fn a_norm_bound(eps: f64) -> f64 {
    2.0 * (0.5 * eps).cos().ln().abs()
}

/// Result of the fixed-point iteration `v ← v0 + A(g(v))`.
#[derive(Debug, Clone)]
pub(crate) struct PicardSolution {
    pub sample: StartupSample,
    pub iterations: usize,
}

/// Iterate `v ← v0 + A(g_k(v_k))` on the grid until the sup-norm change is
/// at most `tol`. `g` receives the grid index and the current value.
pub(crate) fn picard<G>(
    v0: f64,
    rho: &[f64],
    mut g: G,
    tol: f64,
    max_iter: usize,
    contraction: f64,
) -> Result<PicardSolution>
where
    G: FnMut(usize, f64) -> f64,
{
    let eps = *rho.last().unwrap();
    let mut current = vec![v0; rho.len()];
    let mut last_change = f64::INFINITY;
    for it in 1..=max_iter {
        let gs: Vec<f64> = current.iter().enumerate().map(|(k, &v)| g(k, v)).collect();
        if let Some(k) = gs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NotEvaluable { x: current[k] });
        }
        let mut sample = apply_a_sampled(rho, &gs);
        for v in sample.value.iter_mut() {
            *v += v0;
        }
        last_change = sample
            .value
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        current.clone_from(&sample.value);
        if last_change <= tol {
            return Ok(PicardSolution {
                sample,
                iterations: it,
            });
        }
    }
    Err(Error::PicardNoContraction {
        radius: eps,
        estimate: contraction,
        last_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_g_matches_log_cos() {
        let c = 1.7;
        let s = apply_a(|_| c, 0.05, 256).unwrap();
        for (r, v) in s.rho.iter().zip(&s.value) {
            let exact = 2.0 * c * (0.5 * r).cos().ln();
            assert!((v - exact).abs() < 1e-15, "{r}: {v} vs {exact}");
        }
        assert!((s.second[0] + 0.5 * c).abs() < 1e-15);
    }

    #[test]
    fn two_cos_gives_cos_minus_one() {
        let eps = 0.8;
        let s = apply_a(|r| 2.0 * r.cos(), eps, 400).unwrap();
        for (i, r) in s.rho.iter().enumerate() {
            assert!((s.value[i] - (r.cos() - 1.0)).abs() < 1e-11);
            assert!((s.deriv[i] + r.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn second_derivative_at_origin_is_minus_half_g0() {
        let g = |r: f64| 3.0 + r * r - 0.5 * r.powi(4);
        let s = apply_a(g, 0.1, 200).unwrap();
        assert!((s.second[0] + 1.5).abs() < 1e-15);
        // one-sided check from the values: A(h) ≈ A''(0) h²/2
        let h = s.rho[1];
        let est = 2.0 * s.value[1] / (h * h);
        assert!((est + 1.5).abs() < 1e-6);
    }

    #[test]
    fn radius_outside_domain_rejected() {
        assert!(matches!(
            apply_a(|_| 1.0, std::f64::consts::PI, 10),
            Err(Error::Domain(_))
        ));
        assert!(apply_a(|_| 1.0, 4.0, 10).is_err());
    }

    #[test]
    fn picard_fails_when_not_contracting() {
        let rho = uniform_grid(0.05, 64);
        // g(v) = -k v with huge k diverges
        let res = picard(1.0, &rho, |_, v| -1e7 * v, 1e-12, 50, 99.0);
        assert!(matches!(res, Err(Error::PicardNoContraction { .. })));
    }
}
