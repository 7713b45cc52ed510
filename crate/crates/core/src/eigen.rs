//! First Dirichlet eigenvalue of a geodesic disk: the correspondence
//! between `λ` and the radius `R_λ`, with the Neumann constant `α_λ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::radial::{solve_profile, ProfileOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub radius: f64,
    /// `U'(R)` for the eigenfunction normalized by `U(0) = 1`.
    pub alpha: f64,
}

const LAMBDA_MIN: f64 = 1e-6;
const LAMBDA_MAX: f64 = 1e6;

/// Radius of the geodesic disk whose first eigenvalue is `lambda`.
///
/// The profile is positive on `(0, R)` by construction (`R` is its first
/// zero), which certifies that `lambda` is the first eigenvalue.
pub fn radius_for_lambda(lambda: f64) -> Result<EigenPair> {
    radius_for_lambda_with(lambda, &ProfileOptions::default())
}

pub fn radius_for_lambda_with(lambda: f64, opts: &ProfileOptions) -> Result<EigenPair> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidInput("lambda must be positive".into()));
    }
    let p = solve_profile(&Nonlinearity::linear(lambda), 1.0, opts)?;
    let radius = p.r_t.ok_or_else(|| Error::NoZero {
        rho_max: p.rho_max(),
        u: *p.u.last().unwrap(),
        uprime: *p.uprime.last().unwrap(),
    })?;
    let alpha = p.eval(radius).map(|j| j.uprime).unwrap_or(f64::NAN);
    Ok(EigenPair {
        lambda,
        radius,
        alpha,
    })
}

/// Forward map in `ln λ`; `None` when the disk would exceed the integration cap.
fn forward(log_lambda: f64, opts: &ProfileOptions) -> Result<Option<EigenPair>> {
    match radius_for_lambda_with(log_lambda.exp(), opts) {
        Ok(e) => Ok(Some(e)),
        Err(Error::NoZero { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Invert [`radius_for_lambda`] by a decade scan followed by bracketed
/// secant/bisection in `ln λ`, stopping at `|R_λ − R| ≤ 1e-12`.
pub fn lambda_for_radius(radius: f64) -> Result<EigenPair> {
    let opts = ProfileOptions::default();
    if !(radius > 0.0 && radius < std::f64::consts::PI) {
        return Err(Error::InvalidInput("radius must lie in (0, pi)".into()));
    }
    // g(ln λ) = R_λ − radius is decreasing; a missing zero counts as +∞
    let mut lo: Option<(f64, f64)> = None;
    let mut hi: Option<(f64, f64)> = None;
    let mut k = LAMBDA_MIN.log10().round() as i32;
    while k <= LAMBDA_MAX.log10().round() as i32 {
        let x = 10f64.powi(k).ln();
        match forward(x, &opts)? {
            None => lo = Some((x, f64::INFINITY)),
            Some(e) if e.radius > radius => lo = Some((x, e.radius - radius)),
            Some(e) if e.radius == radius => return Ok(e),
            Some(e) => {
                hi = Some((x, e.radius - radius));
                break;
            }
        }
        k += 1;
    }
    let (Some((mut a, mut ga)), Some((mut b, mut gb))) = (lo, hi) else {
        return Err(Error::BracketNotFound {
            lo: LAMBDA_MIN,
            hi: LAMBDA_MAX,
        });
    };
    let mut best: Option<EigenPair> = None;
    let mut side = 0i8;
    for _ in 0..200 {
        let mid = if ga.is_finite() && gb.is_finite() {
            let s = b - gb * (b - a) / (gb - ga);
            if s > a && s < b {
                s
            } else {
                0.5 * (a + b)
            }
        } else {
            0.5 * (a + b)
        };
        let g = match forward(mid, &opts)? {
            None => f64::INFINITY,
            Some(e) => {
                let g = e.radius - radius;
                if best.map_or(true, |b| (b.radius - radius).abs() > g.abs()) {
                    best = Some(e);
                }
                if g.abs() <= 1e-12 {
                    return Ok(e);
                }
                g
            }
        };
        // Illinois modification keeps the secant from stalling on one side
        if g > 0.0 {
            a = mid;
            ga = g;
            if side == 1 {
                gb *= 0.5;
            }
            side = 1;
        } else {
            b = mid;
            gb = g;
            if side == -1 && ga.is_finite() {
                ga *= 0.5;
            }
            side = -1;
        }
        if (b - a).abs() < 1e-15 {
            break;
        }
    }
    match best {
        Some(e) if (e.radius - radius).abs() <= 1e-9 => Ok(e),
        _ => Err(Error::BracketNotFound {
            lo: a.exp(),
            hi: b.exp(),
        }),
    }
}
