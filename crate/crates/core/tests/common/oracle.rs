//! Independent fixed-step shooting oracle.
//!
//! Starts from the regular series `U = t + a ρ² + b ρ⁴` at a small radius
//! (no Picard startup, no adaptive integrator) and marches classical RK4
//! with a fixed step. Shares no code with the library solver.

pub struct Shot {
    pub r_t: f64,
    pub alpha: f64,
    /// `(ρ, U, U')` at requested sample radii.
    pub samples: Vec<(f64, f64, f64)>,
}

fn rhs(f: &dyn Fn(f64) -> f64, x: f64, y: [f64; 2]) -> [f64; 2] {
    [y[1], -y[1] * x.cos() / x.sin() - f(y[0])]
}

/// March from the origin with step `h`, recording `U` at `at` (sorted),
/// until the first zero of `U`. Returns `None` if no zero before `cap`.
pub fn shoot(
    f: &dyn Fn(f64) -> f64,
    fp: &dyn Fn(f64) -> f64,
    t: f64,
    h: f64,
    at: &[f64],
    cap: f64,
) -> Option<Shot> {
    let a = -f(t) / 4.0;
    let b = a * (2.0 / 3.0 - fp(t)) / 16.0;
    let r0 = 1e-3;
    let mut x = r0;
    let mut y = [t + a * r0 * r0 + b * r0.powi(4), 2.0 * a * r0 + 4.0 * b * r0.powi(3)];
    let mut samples = Vec::new();
    let mut next = 0;
    while x < cap {
        let k1 = rhs(f, x, y);
        let k2 = rhs(f, x + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(f, x + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(f, x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let yn = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        let xn = x + h;
        let d0 = rhs(f, x, y);
        let d1 = rhs(f, xn, yn);
        // cubic Hermite inside the step for sampling and root refinement
        let herm = |s: f64| -> (f64, f64) {
            let (s2, s3) = (s * s, s * s * s);
            let u = (2.0 * s3 - 3.0 * s2 + 1.0) * y[0]
                + (s3 - 2.0 * s2 + s) * h * d0[0]
                + (-2.0 * s3 + 3.0 * s2) * yn[0]
                + (s3 - s2) * h * d1[0];
            let up = (2.0 * s3 - 3.0 * s2 + 1.0) * y[1]
                + (s3 - 2.0 * s2 + s) * h * d0[1]
                + (-2.0 * s3 + 3.0 * s2) * yn[1]
                + (s3 - s2) * h * d1[1];
            (u, up)
        };
        while next < at.len() && at[next] <= xn {
            let s = (at[next] - x) / h;
            let (u, up) = herm(s);
            samples.push((at[next], u, up));
            next += 1;
        }
        if yn[0] <= 0.0 {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if herm(mid).0 > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let s = 0.5 * (lo + hi);
            return Some(Shot {
                r_t: x + s * h,
                alpha: herm(s).1,
                samples,
            });
        }
        x = xn;
        y = yn;
    }
    None
}

pub fn linear_radius(lambda: f64, h: f64) -> Option<f64> {
    shoot(&|x| lambda * x, &|_| lambda, 1.0, h, &[], std::f64::consts::PI - 1e-4).map(|s| s.r_t)
}

/// Bisection on `ln λ` for the radius `r` using the oracle forward map.
pub fn lambda_for_radius(r: f64, h: f64) -> f64 {
    let (mut lo, mut hi) = (1e-2f64.ln(), 1e3f64.ln());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match linear_radius(mid.exp(), h) {
            Some(rr) if rr < r => hi = mid,
            _ => lo = mid,
        }
    }
    (0.5 * (lo + hi)).exp()
}

// Frozen oracle values. Computed with a 30-digit Legendre-function and
// ODE solve, confirmed by `shoot` above to ~1e-10 at h = 1e-6.
pub const R_LAMBDA_1: f64 = 2.066461259876597;
pub const LAMBDA_FOR_R_2_5: f64 = 0.5544620354259029;
pub const R_LAMBDA_0_1: f64 = 3.132981865460347;
pub const R_LAMBDA_100: f64 = 0.24008249928294668;
pub const ALLEN_CAHN_T_HALF_R: f64 = 2.2002856716202084;
pub const ALLEN_CAHN_T_HALF_ALPHA: f64 = -0.5009746916820286;
/// r_t for Allen–Cahn at t = 0.1, 0.5, 0.9, 0.95.
pub const ALLEN_CAHN_R_SWEEP: [(f64, f64); 4] =
    [(0.1, 2.07119032), (0.5, 2.20028567), (0.9, 2.76397099), (0.95, 2.96244399)];
/// Central difference in t (step 1e-4) of U_t at ρ = r_{1/2}/2.
pub const ALLEN_CAHN_H_AT_HALF_R: f64 = 0.897005595522915;
pub const SERRIN_R_1: f64 = 1.8382133145871768;
