//! The sign, monotonicity and non-degeneracy checks the family
//! construction rests on, run over a sweep of initial values `t`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::nonlinearity::{check_hypothesis_h, Nonlinearity};
use crate::radial::{
    jacobian_w, log_concavity, profile_residual, solve_profile, solve_variation, variation_residual,
    ProfileOptions, RadialProfile, VariationProfile,
};

/// Residual bound for accepted profiles.
pub const RESIDUAL_TOL: f64 = 1e-6;
/// Slack for "nondecreasing" comparisons between neighbouring radii.
pub const RADIUS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub lemma: String,
    pub t: Option<f64>,
    pub pass: bool,
    /// Worst observed margin (sign convention stated in `detail`).
    pub worst: f64,
    pub at: Option<f64>,
    pub detail: String,
}

impl fmt::Display for LemmaCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let t = self.t.map_or(String::from("all"), |t| format!("{t:.6}"));
        write!(f, "{verdict} {:<22} t={t:<10} worst={:+.6e}", self.lemma, self.worst)?;
        if let Some(at) = self.at {
            write!(f, " at={at:.6}")?;
        }
        write!(f, "  {}", self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuite {
    pub f: String,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaSuite {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// `n` log-spaced values in `[a, b]`.
pub fn log_sweep(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| (a.ln() + (b.ln() - a.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

fn check(lemma: &str, t: Option<f64>, pass: bool, worst: f64, at: Option<f64>, detail: impl Into<String>) -> LemmaCheck {
    LemmaCheck {
        lemma: lemma.into(),
        t,
        pass,
        worst,
        at,
        detail: detail.into(),
    }
}

fn per_t_checks(nl: &Nonlinearity, p: &RadialProfile, v: &VariationProfile) -> Vec<LemmaCheck> {
    let t = Some(p.t);
    let mut out = Vec::new();
    let Some(r) = p.r_t else {
        out.push(check("first-zero", t, false, f64::NAN, None, "no zero before the integration cap"));
        return out;
    };
    let alpha = p.eval(r).map_or(f64::NAN, |j| j.uprime);
    out.push(check("first-zero", t, alpha < 0.0, alpha, Some(r), "U'(r_t) < 0"));

    let (mut hmin, mut hat) = (f64::INFINITY, 0.0);
    for k in 0..p.rho.len() {
        if p.rho[k] >= r {
            break;
        }
        if v.h[k] < hmin {
            hmin = v.h[k];
            hat = p.rho[k];
        }
    }
    out.push(check("H-positive", t, hmin > 0.0, hmin, Some(hat), "min H on [0, r_t)"));

    match jacobian_w(p, v) {
        Ok(w) => out.push(check("W-negative", t, w.negative, w.max_w, Some(w.max_w_at), "max W on [0, r_t]")),
        Err(e) => out.push(check("W-negative", t, false, f64::NAN, None, e.to_string())),
    }

    if r > FRAC_PI_2 {
        let (mut m, mut at) = (f64::NEG_INFINITY, FRAC_PI_2);
        let scale = p.usecond.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for k in 0..p.rho.len() {
            if p.rho[k] >= FRAC_PI_2 && p.rho[k] <= r && p.usecond[k] > m {
                m = p.usecond[k];
                at = p.rho[k];
            }
        }
        out.push(check(
            "concave-past-equator",
            t,
            m <= 1e-12 * scale,
            m,
            Some(at),
            "max U'' on [pi/2, r_t]",
        ));
    } else {
        out.push(check("concave-past-equator", t, true, f64::NAN, None, "not applicable: r_t <= pi/2"));
    }

    if nl.linear_lambda().is_some() {
        match log_concavity(p) {
            Ok(lc) => out.push(check(
                "log-concavity",
                t,
                lc.max_value < 0.0,
                lc.max_value,
                Some(lc.max_at),
                format!("max U''U - U'^2 on [0, r_t + {}]", p.options.zero_margin),
            )),
            Err(e) => out.push(check("log-concavity", t, false, f64::NAN, None, e.to_string())),
        }
    }

    let res = profile_residual(nl, p).max(variation_residual(nl, p, v));
    out.push(check("ode-residual", t, res <= RESIDUAL_TOL, res, None, "max |residual| of U and H"));
    out
}

/// Run every check over the sweep `ts`. Solver failures are reported as
/// failing checks; the suite itself never aborts.
pub fn run_lemma_suite(nl: &Nonlinearity, ts: &[f64], opts: &ProfileOptions) -> LemmaSuite {
    let mut checks = Vec::new();
    let t_lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let t_hi = ts.iter().copied().fold(0.0, f64::max);
    match check_hypothesis_h(nl, 1e-3 * t_lo, t_hi, 2000) {
        Ok(h) => {
            let (margin, at) = h.worst();
            checks.push(check("hypothesis-H", None, h.holds, margin, Some(at), h.to_string()));
        }
        Err(e) => checks.push(check("hypothesis-H", None, false, f64::NAN, None, e.to_string())),
    }

    let solved: Vec<(f64, Result<(RadialProfile, VariationProfile)>)> = ts
        .par_iter()
        .map(|&t| {
            let pv = solve_profile(nl, t, opts).and_then(|p| {
                let v = solve_variation(nl, &p)?;
                Ok((p, v))
            });
            (t, pv)
        })
        .collect();

    let mut ok: Vec<&RadialProfile> = Vec::new();
    for (t, pv) in &solved {
        match pv {
            Ok((p, v)) => {
                checks.extend(per_t_checks(nl, p, v));
                ok.push(p);
            }
            Err(e) => checks.push(check("solve", Some(*t), false, f64::NAN, None, e.to_string())),
        }
    }
    ok.sort_by(|a, b| a.t.total_cmp(&b.t));

    for w in ok.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (Some(ra), Some(rb)) = (a.r_t, b.r_t) else {
            continue;
        };
        let common = ra.min(rb);
        let (mut gap, mut at) = (f64::INFINITY, 0.0);
        for k in 0..512 {
            let rho = common * k as f64 / 512.0;
            if let (Some(ja), Some(jb)) = (a.eval(rho), b.eval(rho)) {
                if jb.u - ja.u < gap {
                    gap = jb.u - ja.u;
                    at = rho;
                }
            }
        }
        checks.push(check(
            "U-increasing-in-t",
            Some(b.t),
            gap > 0.0,
            gap,
            Some(at),
            format!("min U_t(rho) - U_s(rho) for s = {:.6}", a.t),
        ));
        let dr = rb - ra;
        checks.push(check(
            "r_t-nondecreasing",
            Some(b.t),
            dr >= -RADIUS_SLACK,
            dr,
            None,
            format!("r_t - r_s for s = {:.6}", a.t),
        ));
    }
    LemmaSuite {
        f: nl.label().to_string(),
        checks,
    }
}

/// `min (U_t² + U_t'²)` over `[0, r_t]` for each `t`; it should grow with `t`.
///
/// When `r_t` is too close to `π` to be resolved (e.g. `f ≡ 1` with large
/// `t`), the minimum is taken over the integrated range and the entry is
/// marked as truncated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Properness {
    pub t: Vec<f64>,
    pub min_jet_norm: Vec<f64>,
    pub truncated: Vec<bool>,
    pub increasing: bool,
}

pub fn properness(nl: &Nonlinearity, ts: &[f64], opts: &ProfileOptions) -> Result<Properness> {
    let rows: Vec<(f64, bool)> = ts
        .par_iter()
        .map(|&t| {
            let p = solve_profile(nl, t, opts)?;
            Ok(match p.min_jet_norm() {
                Some(m) => (m, false),
                None => {
                    let m = p
                        .u
                        .iter()
                        .zip(&p.uprime)
                        .map(|(u, d)| u * u + d * d)
                        .fold(f64::INFINITY, f64::min);
                    (m, true)
                }
            })
        })
        .collect::<Result<_>>()?;
    let (norms, truncated): (Vec<f64>, Vec<bool>) = rows.into_iter().unzip();
    Ok(Properness {
        t: ts.to_vec(),
        increasing: norms.windows(2).all(|w| w[1] > w[0]),
        min_jet_norm: norms,
        truncated,
    })
}
