//! Even solutions of `U'' + (cot ρ)U' + f(U) = 0` with `U(0) = t`.
//!
//! The profile is built in three stages:
//!
//! 1. Picard iteration of `U ← t + A(f∘U)` on `[0, ε₀]`, where the
//!    coefficient `cot ρ` is singular.
//! 2. An adaptive Dormand–Prince sweep from `ε₀` to locate the first zero
//!    and fix the end of the profile (`r_t + margin`, clipped below `π`).
//! 3. A second sweep that lands on every node of a uniform dense grid; the
//!    stored `U''` comes from the equation itself.
//!
//! Values between dense nodes are cubic Hermite interpolants built from the
//! stored derivatives.

mod dopri;
pub mod startup;

use std::f64::consts::PI;
use std::io::Write;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::hermite;
use crate::nonlinearity::Nonlinearity;
use dopri::Dopri5;
use startup::{a_norm_bound, picard, uniform_grid, StartupSample};

pub use startup::apply_a;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    /// Initial startup radius ε₀; halved until the contraction bound holds.
    pub startup_radius: f64,
    pub startup_cells: usize,
    /// Sup-norm stopping threshold for Picard, relative to `max(1, |t|)`.
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Distance integrated past the first zero.
    pub zero_margin: f64,
    /// Hard upper limit for ρ (the equation is singular at π).
    pub rho_cap: f64,
    pub dense_points: usize,
    pub root_tol: f64,
    pub max_steps: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            startup_radius: 0.05,
            startup_cells: 256,
            picard_tol: 1e-12,
            picard_max_iter: 50,
            rtol: 1e-10,
            atol: 1e-12,
            zero_margin: 0.02,
            rho_cap: PI - 1e-3,
            dense_points: 2048,
            root_tol: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

impl ProfileOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        let positive = [
            self.startup_radius,
            self.picard_tol,
            self.rtol,
            self.atol,
            self.zero_margin,
            self.root_tol,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput("solver tolerances must be positive".into()));
        }
        if !(self.rho_cap > self.startup_radius && self.rho_cap < PI) {
            return Err(Error::InvalidInput("rho_cap must lie in (startup_radius, pi)".into()));
        }
        if self.startup_cells < 8 || self.dense_points < 16 {
            return Err(Error::InvalidInput("grids are too coarse".into()));
        }
        Ok(())
    }

    fn integrator(&self) -> Dopri5 {
        Dopri5 {
            rtol: self.rtol,
            atol: self.atol,
            max_steps: self.max_steps,
        }
    }
}

/// A sampled even solution `U_t` on `[0, ρ_max]`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub t: f64,
    pub label: String,
    /// Uniform dense grid starting at 0.
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub uprime: Vec<f64>,
    pub usecond: Vec<f64>,
    pub r_t: Option<f64>,
    /// Picard solution on `[0, ε₀]`.
    pub startup: StartupSample,
    pub picard_iterations: usize,
    pub contraction: f64,
    pub adaptive_steps: usize,
    pub options: ProfileOptions,
}

/// Values at one ρ: `(U, dU/dρ)` from the `U` interpolant and
/// `(U', dU'/dρ)` from the `U'` interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub u: f64,
    pub du: f64,
    pub uprime: f64,
    pub duprime: f64,
}

fn dense_locate(rho: &[f64], x: f64) -> Option<usize> {
    let n = rho.len() - 1;
    let end = rho[n];
    if !(x >= 0.0 && x <= end * (1.0 + 1e-12) + 1e-15) {
        return None;
    }
    let step = end / n as f64;
    Some(((x / step).floor() as usize).min(n - 1))
}

fn hermite_jet(
    rho: &[f64],
    a: &[f64],
    da: &[f64],
    b: &[f64],
    db: &[f64],
    x: f64,
) -> Option<ProfileJet> {
    let i = dense_locate(rho, x)?;
    let (u, du) = hermite(rho[i], rho[i + 1], a[i], da[i], a[i + 1], da[i + 1], x);
    let (up, dup) = hermite(rho[i], rho[i + 1], b[i], db[i], b[i + 1], db[i + 1], x);
    Some(ProfileJet {
        u,
        du,
        uprime: up,
        duprime: dup,
    })
}

impl RadialProfile {
    pub fn rho_max(&self) -> f64 {
        *self.rho.last().unwrap()
    }

    pub fn startup_radius(&self) -> f64 {
        *self.startup.rho.last().unwrap()
    }

    /// Interpolated `(U, U')` data at `rho ∈ [0, ρ_max]`.
    pub fn eval(&self, rho: f64) -> Option<ProfileJet> {
        hermite_jet(&self.rho, &self.u, &self.uprime, &self.uprime, &self.usecond, rho)
    }

    /// Minimum of `U² + U'²` over `[0, r_t]` (properness diagnostic).
    pub fn min_jet_norm(&self) -> Option<f64> {
        let r = self.r_t?;
        let mut m = f64::INFINITY;
        for k in 0..self.rho.len() {
            if self.rho[k] > r {
                break;
            }
            m = m.min(self.u[k] * self.u[k] + self.uprime[k] * self.uprime[k]);
        }
        let end = self.eval(r)?;
        Some(m.min(end.u * end.u + end.uprime * end.uprime))
    }

    /// CSV with columns `rho,U,Uprime,Usecond`, full round-trip precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "rho,U,Uprime,Usecond")?;
        for k in 0..self.rho.len() {
            writeln!(
                w,
                "{:?},{:?},{:?},{:?}",
                self.rho[k], self.u[k], self.uprime[k], self.usecond[k]
            )?;
        }
        Ok(())
    }

    pub fn metadata(&self) -> ProfileMetadata {
        ProfileMetadata {
            t: self.t,
            r_t: self.r_t,
            alpha: self.r_t.and_then(|r| self.eval(r)).map(|j| j.uprime),
            f: self.label.clone(),
            rho_max: self.rho_max(),
            dense_points: self.rho.len(),
            startup_radius: self.startup_radius(),
            picard_iterations: self.picard_iterations,
            contraction: self.contraction,
            adaptive_steps: self.adaptive_steps,
            options: self.options,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub t: f64,
    pub r_t: Option<f64>,
    pub alpha: Option<f64>,
    pub f: String,
    pub rho_max: f64,
    pub dense_points: usize,
    pub startup_radius: f64,
    pub picard_iterations: usize,
    pub contraction: f64,
    pub adaptive_steps: usize,
    pub options: ProfileOptions,
}

/// Solution `H_t = ∂U_t/∂t` of the linearized equation on the grid of its parent profile.
#[derive(Debug, Clone)]
pub struct VariationProfile {
    pub t: f64,
    pub rho: Vec<f64>,
    pub h: Vec<f64>,
    pub hprime: Vec<f64>,
    pub hsecond: Vec<f64>,
    pub picard_iterations: usize,
}

impl VariationProfile {
    pub fn eval(&self, rho: f64) -> Option<ProfileJet> {
        hermite_jet(&self.rho, &self.h, &self.hprime, &self.hprime, &self.hsecond, rho)
    }
}

fn sup_abs_on<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64) -> f64 {
    (0..=64)
        .map(|k| g(lo + (hi - lo) * k as f64 / 64.0).abs())
        .fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) })
}

/// Contraction bound `2|ln cos(ε/2)| sup|f'|` over the ball the iterates live in.
fn contraction_estimate(nl: &Nonlinearity, t: f64, eps: f64) -> f64 {
    let bound = a_norm_bound(eps);
    let reach = bound * sup_abs_on(|x| nl.f(x), t - 1.0, t + 1.0);
    let ball = (2.0 * reach).max(1e-6);
    bound * sup_abs_on(|x| nl.fprime(x), t - ball, t + ball)
}

#[inline]
fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// Solve for the even profile with `U(0) = t`.
pub fn solve_profile(nl: &Nonlinearity, t: f64, opts: &ProfileOptions) -> Result<RadialProfile> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput("t must be positive".into()));
    }
    opts.validate()?;
    nl.try_f(t)?;

    // stage 1: startup
    let mut eps = opts.startup_radius;
    let mut kappa = contraction_estimate(nl, t, eps);
    while !(kappa < 0.5) {
        if kappa.is_nan() {
            return Err(Error::NotEvaluable { x: t });
        }
        eps *= 0.5;
        if eps < 1e-9 {
            return Err(Error::PicardNoContraction {
                radius: eps,
                estimate: kappa,
                last_change: f64::NAN,
            });
        }
        kappa = contraction_estimate(nl, t, eps);
    }
    let grid = uniform_grid(eps, opts.startup_cells);
    let tol = opts.picard_tol * t.abs().max(1.0);
    let pic = picard(t, &grid, |_, v| nl.f(v), tol, opts.picard_max_iter, kappa)?;
    let st = pic.sample;

    let rhs = |x: f64, y: &[f64; 2]| [y[1], -cot(x) * y[1] - nl.f(y[0])];
    let solver = opts.integrator();
    let y_eps = [*st.value.last().unwrap(), *st.deriv.last().unwrap()];

    // stage 2: locate the first zero to size the dense grid
    let mut zero_guess = st
        .value
        .iter()
        .position(|&v| v <= 0.0)
        .map(|k| st.rho[k]);
    let mut adaptive_steps = 0;
    if zero_guess.is_none() {
        let mut prev = (eps, y_eps);
        let mut stop_at = f64::INFINITY;
        let mut found = None;
        let end = solver.integrate(
            rhs,
            eps,
            y_eps,
            opts.rho_cap,
            eps.min(1e-3),
            0.05,
            |x, y, _| {
                if found.is_none() && y[0] <= 0.0 && prev.1[0] > 0.0 {
                    let (x0, u0) = (prev.0, prev.1[0]);
                    let r = x0 + (x - x0) * u0 / (u0 - y[0]);
                    found = Some(r);
                    stop_at = r + opts.zero_margin;
                }
                prev = (x, *y);
                if x >= stop_at {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        )?;
        adaptive_steps = end.steps;
        zero_guess = found;
    }
    let rho_end = match zero_guess {
        Some(r) => (r + opts.zero_margin).min(opts.rho_cap),
        None => opts.rho_cap,
    };

    // stage 3: dense resampling
    let n = opts.dense_points;
    let rho: Vec<f64> = (0..n).map(|k| rho_end * k as f64 / (n - 1) as f64).collect();
    let mut u = vec![0.0; n];
    let mut up = vec![0.0; n];
    let mut x = eps;
    let mut y = y_eps;
    let mut h = eps.min(1e-3);
    let step = rho_end / (n - 1) as f64;
    for k in 0..n {
        let r = rho[k];
        if r <= eps {
            let j = hermite_jet(&st.rho, &st.value, &st.deriv, &st.deriv, &st.second, r)
                .expect("node inside startup interval");
            u[k] = j.u;
            up[k] = j.uprime;
        } else {
            let end = solver.integrate(rhs, x, y, r, h, step, |_, _, _| ControlFlow::Continue(()))?;
            x = end.x;
            y = end.y;
            h = end.h;
            u[k] = y[0];
            up[k] = y[1];
        }
    }
    let mut usecond = vec![0.0; n];
    for k in 0..n {
        let fu = nl.try_f(u[k])?;
        usecond[k] = if k == 0 { -0.5 * fu } else { -cot(rho[k]) * up[k] - fu };
    }

    let mut profile = RadialProfile {
        t,
        label: nl.label().to_string(),
        rho,
        u,
        uprime: up,
        usecond,
        r_t: None,
        startup: st,
        picard_iterations: pic.iterations,
        contraction: kappa,
        adaptive_steps,
        options: *opts,
    };
    profile.r_t = first_zero(&profile).ok();
    Ok(profile)
}

/// First positive zero of `U`, refined on the dense interpolant by a
/// bisection/secant (Illinois) iteration.
pub fn first_zero(p: &RadialProfile) -> Result<f64> {
    let k = match p.u.iter().position(|&v| v <= 0.0) {
        Some(k) if k > 0 => k,
        _ => {
            let last = p.rho.len() - 1;
            return Err(Error::NoZero {
                rho_max: p.rho_max(),
                u: p.u[last],
                uprime: p.uprime[last],
            });
        }
    };
    if p.u[k] == 0.0 {
        return Ok(p.rho[k]);
    }
    let (x0, x1) = (p.rho[k - 1], p.rho[k]);
    let g = |x: f64| {
        hermite(x0, x1, p.u[k - 1], p.uprime[k - 1], p.u[k], p.uprime[k], x).0
    };
    let (mut a, mut b) = (x0, x1);
    let (mut fa, mut fb) = (p.u[k - 1], p.u[k]);
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= p.options.root_tol {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = g(c);
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Solve `H'' + (cot ρ)H' + f'(U_t)H = 0`, `H(0) = 1`, on the grid of `p`.
pub fn solve_variation(nl: &Nonlinearity, p: &RadialProfile) -> Result<VariationProfile> {
    let opts = &p.options;
    let st = &p.startup;
    let eps = p.startup_radius();
    let lip = st
        .value
        .iter()
        .map(|&v| nl.fprime(v).abs())
        .fold(0.0, f64::max);
    let kappa = a_norm_bound(eps) * lip;
    if !(kappa < 0.5) {
        return Err(Error::PicardNoContraction {
            radius: eps,
            estimate: kappa,
            last_change: f64::NAN,
        });
    }
    let fp0: Vec<f64> = st.value.iter().map(|&v| nl.fprime(v)).collect();
    let pic = picard(
        1.0,
        &st.rho,
        |k, v| fp0[k] * v,
        opts.picard_tol,
        opts.picard_max_iter,
        kappa,
    )?;
    let hs = pic.sample;

    let rhs = |x: f64, y: &[f64; 4]| {
        let c = cot(x);
        [
            y[1],
            -c * y[1] - nl.f(y[0]),
            y[3],
            -c * y[3] - nl.fprime(y[0]) * y[2],
        ]
    };
    let solver = opts.integrator();
    let n = p.rho.len();
    let step = p.rho_max() / (n - 1) as f64;
    let mut h = vec![0.0; n];
    let mut hp = vec![0.0; n];
    let mut x = eps;
    let mut y = [
        *st.value.last().unwrap(),
        *st.deriv.last().unwrap(),
        *hs.value.last().unwrap(),
        *hs.deriv.last().unwrap(),
    ];
    let mut hstep = eps.min(1e-3);
    for k in 0..n {
        let r = p.rho[k];
        if r <= eps {
            let j = hermite_jet(&hs.rho, &hs.value, &hs.deriv, &hs.deriv, &hs.second, r)
                .expect("node inside startup interval");
            h[k] = j.u;
            hp[k] = j.uprime;
        } else {
            let end = solver.integrate(rhs, x, y, r, hstep, step, |_, _, _| {
                ControlFlow::Continue(())
            })?;
            x = end.x;
            y = end.y;
            hstep = end.h;
            h[k] = y[2];
            hp[k] = y[3];
        }
    }
    let hsecond = (0..n)
        .map(|k| {
            let fp = nl.fprime(p.u[k]);
            if k == 0 {
                -0.5 * fp * h[0]
            } else {
                -cot(p.rho[k]) * hp[k] - fp * h[k]
            }
        })
        .collect();
    Ok(VariationProfile {
        t: p.t,
        rho: p.rho.clone(),
        h,
        hprime: hp,
        hsecond,
        picard_iterations: pic.iterations,
    })
}

/// Samples of `W = H U'' − U' H'` on `[0, r_t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WReport {
    pub rho: Vec<f64>,
    pub w: Vec<f64>,
    pub max_w: f64,
    pub max_w_at: f64,
    pub min_abs_w: f64,
    pub negative: bool,
}

pub fn jacobian_w(p: &RadialProfile, v: &VariationProfile) -> Result<WReport> {
    jacobian_w_upto(p, v, p.r_t.unwrap_or_else(|| p.rho_max()))
}

/// `W` on `[0, upto]` (the extended range past `r_t` is used by the atlas).
pub fn jacobian_w_upto(p: &RadialProfile, v: &VariationProfile, upto: f64) -> Result<WReport> {
    if p.rho != v.rho {
        return Err(Error::GridMismatch);
    }
    let upto = upto.min(p.rho_max());
    let mut rho = Vec::new();
    let mut w = Vec::new();
    for k in 0..p.rho.len() {
        if p.rho[k] > upto {
            break;
        }
        rho.push(p.rho[k]);
        w.push(v.h[k] * p.usecond[k] - p.uprime[k] * v.hprime[k]);
    }
    if rho.last().map_or(true, |&r| r < upto) {
        let pj = p.eval(upto).ok_or(Error::GridMismatch)?;
        let vj = v.eval(upto).ok_or(Error::GridMismatch)?;
        rho.push(upto);
        w.push(vj.u * pj.duprime - pj.uprime * vj.uprime);
    }
    let (max_w, max_w_at) = rho
        .iter()
        .zip(&w)
        .fold((f64::NEG_INFINITY, 0.0), |(m, at), (&r, &x)| {
            if x > m {
                (x, r)
            } else {
                (m, at)
            }
        });
    let min_abs_w = w.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    Ok(WReport {
        negative: max_w < 0.0,
        rho,
        w,
        max_w,
        max_w_at,
        min_abs_w,
    })
}

/// Samples of `U''U − U'²` over the whole (extended) profile.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConcavityReport {
    pub rho: Vec<f64>,
    pub value: Vec<f64>,
    pub max_value: f64,
    pub max_at: f64,
    pub at_zero: f64,
    pub at_first_zero: f64,
}

pub fn log_concavity(p: &RadialProfile) -> Result<LogConcavityReport> {
    let r = p.r_t.ok_or(Error::NotExtended)?;
    if !(p.rho_max() > r + 1e-9) {
        return Err(Error::NotExtended);
    }
    let value: Vec<f64> = (0..p.rho.len())
        .map(|k| p.usecond[k] * p.u[k] - p.uprime[k] * p.uprime[k])
        .collect();
    let (max_value, max_at) = p
        .rho
        .iter()
        .zip(&value)
        .fold((f64::NEG_INFINITY, 0.0), |(m, at), (&r, &x)| {
            if x > m {
                (x, r)
            } else {
                (m, at)
            }
        });
    let end = p.eval(r).ok_or(Error::NotExtended)?;
    Ok(LogConcavityReport {
        rho: p.rho.clone(),
        at_zero: value[0],
        at_first_zero: end.duprime * end.u - end.uprime * end.uprime,
        value,
        max_value,
        max_at,
    })
}

/// Sixth-order central difference of a uniformly sampled column.
fn fd6(col: &[f64], k: usize, step: f64) -> f64 {
    (col[k + 3] - 9.0 * col[k + 2] + 45.0 * col[k + 1] - 45.0 * col[k - 1] + 9.0 * col[k - 2]
        - col[k - 3])
        / (60.0 * step)
}

/// `max |U'' + (cot ρ)U' + f(U)|` over interior nodes, with `U''` taken
/// from a finite difference of the stored `U'` (not from the equation).
pub fn profile_residual(nl: &Nonlinearity, p: &RadialProfile) -> f64 {
    let n = p.rho.len();
    let step = p.rho_max() / (n - 1) as f64;
    (3..n - 3)
        .map(|k| (fd6(&p.uprime, k, step) + cot(p.rho[k]) * p.uprime[k] + nl.f(p.u[k])).abs())
        .fold(0.0, f64::max)
}

/// Same check for `H'' + (cot ρ)H' + f'(U)H`.
pub fn variation_residual(nl: &Nonlinearity, p: &RadialProfile, v: &VariationProfile) -> f64 {
    let n = v.rho.len();
    let step = p.rho_max() / (n - 1) as f64;
    (3..n - 3)
        .map(|k| {
            (fd6(&v.hprime, k, step) + cot(v.rho[k]) * v.hprime[k] + nl.fprime(p.u[k]) * v.h[k])
                .abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> ProfileOptions {
        ProfileOptions::default()
    }

    #[test]
    fn hemisphere_profile_is_cosine() {
        let p = solve_profile(&Nonlinearity::linear(2.0), 1.0, &opts()).unwrap();
        let mut err: f64 = 0.0;
        for k in 0..p.rho.len() {
            if p.rho[k] <= PI / 2.0 {
                err = err.max((p.u[k] - p.rho[k].cos()).abs());
                err = err.max((p.uprime[k] + p.rho[k].sin()).abs());
            }
        }
        assert!(err < 1e-8, "sup error {err}");
        assert!((p.r_t.unwrap() - PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn initial_conditions() {
        let nl = Nonlinearity::allen_cahn();
        let p = solve_profile(&nl, 0.5, &opts()).unwrap();
        assert_eq!(p.u[0], 0.5);
        assert_eq!(p.uprime[0], 0.0);
        assert!((p.usecond[0] + 0.5 * nl.f(0.5)).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_t_rejected() {
        for t in [0.0, -1.0, f64::NAN] {
            let e = solve_profile(&Nonlinearity::linear(2.0), t, &opts()).unwrap_err();
            assert!(e.to_string().contains("t must be positive"));
        }
    }

    #[test]
    fn residuals_are_small() {
        for nl in [Nonlinearity::allen_cahn(), Nonlinearity::serrin(), Nonlinearity::linear(5.0)] {
            let p = solve_profile(&nl, 0.7, &opts()).unwrap();
            let v = solve_variation(&nl, &p).unwrap();
            assert!(profile_residual(&nl, &p) < 1e-6);
            assert!(variation_residual(&nl, &p, &v) < 1e-6);
        }
    }

    #[test]
    fn startup_matches_direct_integration_from_half_radius() {
        let nl = Nonlinearity::allen_cahn();
        let p = solve_profile(&nl, 0.5, &opts()).unwrap();
        let st = &p.startup;
        let mid = st.rho.len() / 2;
        let eps = p.startup_radius();
        let end = opts()
            .integrator()
            .integrate(
                |x, y: &[f64; 2]| [y[1], -cot(x) * y[1] - nl.f(y[0])],
                st.rho[mid],
                [st.value[mid], st.deriv[mid]],
                eps,
                1e-4,
                1e-3,
                |_, _, _| ControlFlow::Continue(()),
            )
            .unwrap();
        assert!((end.y[0] - st.value.last().unwrap()).abs() < 1e-8);
        assert!((end.y[1] - st.deriv.last().unwrap()).abs() < 1e-8);
    }

    #[test]
    fn no_zero_reports_end_state() {
        // λ = 0.01 puts the first zero beyond the cap
        let p = solve_profile(&Nonlinearity::linear(0.01), 1.0, &opts()).unwrap();
        assert!(p.r_t.is_none());
        match first_zero(&p) {
            Err(Error::NoZero { rho_max, u, .. }) => {
                assert!((rho_max - opts().rho_cap).abs() < 1e-12);
                assert!(u > 0.0);
            }
            other => panic!("expected NoZero, got {other:?}"),
        }
    }

    #[test]
    fn serrin_zero_closed_form() {
        // U_t = t + 2 ln cos(ρ/2)
        for t in [0.25, 1.0, 4.0] {
            let p = solve_profile(&Nonlinearity::serrin(), t, &opts()).unwrap();
            let exact = 2.0 * (-0.5 * t).exp().acos();
            assert!((p.r_t.unwrap() - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn variation_of_linear_case_is_u_over_t() {
        let nl = Nonlinearity::linear(3.0);
        let p = solve_profile(&nl, 2.0, &opts()).unwrap();
        let v = solve_variation(&nl, &p).unwrap();
        assert_eq!(v.h[0], 1.0);
        assert_eq!(v.hprime[0], 0.0);
        for k in 0..p.rho.len() {
            assert!((v.h[k] - p.u[k] / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn w_at_origin() {
        let nl = Nonlinearity::allen_cahn();
        let p = solve_profile(&nl, 0.5, &opts()).unwrap();
        let v = solve_variation(&nl, &p).unwrap();
        let w = jacobian_w(&p, &v).unwrap();
        assert!((w.w[0] + 0.5 * nl.f(0.5)).abs() < 1e-15);
        assert!(w.negative);
        assert_eq!(*w.rho.last().unwrap(), p.r_t.unwrap());
    }

    #[test]
    fn grid_mismatch_detected() {
        let nl = Nonlinearity::serrin();
        let p1 = solve_profile(&nl, 1.0, &opts()).unwrap();
        let p2 = solve_profile(&nl, 2.0, &opts()).unwrap();
        let v2 = solve_variation(&nl, &p2).unwrap();
        assert_eq!(jacobian_w(&p1, &v2), Err(Error::GridMismatch));
    }

    #[test]
    fn log_concavity_hemisphere_is_minus_one() {
        let p = solve_profile(&Nonlinearity::linear(2.0), 1.0, &opts()).unwrap();
        let lc = log_concavity(&p).unwrap();
        for v in &lc.value {
            assert!((v + 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn log_concavity_requires_extension() {
        let mut p = solve_profile(&Nonlinearity::linear(2.0), 1.0, &opts()).unwrap();
        p.r_t = Some(p.rho_max());
        assert_eq!(log_concavity(&p), Err(Error::NotExtended));
        p.r_t = None;
        assert_eq!(log_concavity(&p), Err(Error::NotExtended));
    }

    #[test]
    fn table_nonlinearity_out_of_range_errors() {
        let nl = Nonlinearity::table("t", vec![0.5, 1.0, 2.0], vec![1.0, 1.0, 1.0]).unwrap();
        // U drops below 0.5 before reaching zero
        assert!(solve_profile(&nl, 1.0, &opts()).is_err());
    }
}
