//! The candidate family: a `t`-indexed atlas of radial profiles and the
//! map `F(t, ρ) = (U_t(ρ), U_t'(ρ))` together with its inverse `(T, R)`.
//!
//! Profiles are interpolated in `t` by cubic Hermite with the variation
//! `H_t = ∂U_t/∂t` as exact knot slopes, and in `ρ` by cubic Hermite with
//! the stored derivatives. `F` is extended evenly in `ρ`
//! (`x(−ρ) = x(ρ)`, `y(−ρ) = −y(ρ)`) and a little past the first zero, so
//! the domain is `Δ = {t_min ≤ t ≤ t_max, |ρ| ≤ ρ_ext(t)}`.

mod candidate;
mod region;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{hermite, hermite_basis, locate};
use crate::nonlinearity::{check_hypothesis_h, Nonlinearity};
use crate::radial::{
    jacobian_w_upto, solve_profile, solve_variation, ProfileOptions, RadialProfile,
    VariationProfile,
};

pub(crate) use candidate::candidate_for_jet;
pub use candidate::{candidate_at, evaluate_candidate, CandidateJet, CandidateSolution};
pub use region::Region;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AtlasOptions {
    pub profile: ProfileOptions,
    /// How far past `r_t` the domain `Δ` reaches.
    pub extension: f64,
    pub hypothesis_samples: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl Default for AtlasOptions {
    fn default() -> Self {
        Self {
            profile: ProfileOptions::default(),
            extension: 0.01,
            hypothesis_samples: 2000,
            newton_tol: 1e-11,
            newton_max_iter: 50,
        }
    }
}

/// One knot of the atlas.
#[derive(Debug, Clone)]
pub struct Knot {
    pub profile: RadialProfile,
    pub variation: VariationProfile,
    pub r_t: f64,
    /// `dr_t/dt = −H_t(r_t)/U_t'(r_t)`.
    pub dr_dt: f64,
}

/// `F` and its partial derivatives at one `(t, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FJet {
    pub x: f64,
    pub y: f64,
    pub x_t: f64,
    pub x_rho: f64,
    pub y_t: f64,
    pub y_rho: f64,
}

impl FJet {
    pub fn det(&self) -> f64 {
        self.x_t * self.y_rho - self.x_rho * self.y_t
    }
}

/// Converged inverse `(T, R)` of a point `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inverse {
    pub t: f64,
    pub rho: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct FamilyAtlas {
    nl: Nonlinearity,
    knots_t: Vec<f64>,
    knots: Vec<Knot>,
    options: AtlasOptions,
    region: Region,
    seeds: Vec<(f64, f64, f64, f64)>,
}

fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                a
            } else if k == n - 1 {
                b
            } else {
                (la + (lb - la) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

fn solve_knot(nl: &Nonlinearity, t: f64, opts: &ProfileOptions) -> Result<Knot> {
    let profile = solve_profile(nl, t, opts)?;
    let r_t = profile.r_t.ok_or_else(|| Error::NoZero {
        rho_max: profile.rho_max(),
        u: *profile.u.last().unwrap(),
        uprime: *profile.uprime.last().unwrap(),
    })?;
    let variation = solve_variation(nl, &profile)?;
    let up = profile.eval(r_t).map(|j| j.uprime).unwrap_or(f64::NAN);
    let h = variation.eval(r_t).map(|j| j.u).unwrap_or(f64::NAN);
    Ok(Knot {
        profile,
        variation,
        r_t,
        dr_dt: -h / up,
    })
}

/// Build the atlas on `n_t` log-spaced knots in `[t_min, t_max]`.
pub fn build_atlas(nl: &Nonlinearity, t_min: f64, t_max: f64, n_t: usize) -> Result<FamilyAtlas> {
    build_atlas_with(nl, t_min, t_max, n_t, &AtlasOptions::default())
}

pub fn build_atlas_with(
    nl: &Nonlinearity,
    t_min: f64,
    t_max: f64,
    n_t: usize,
    options: &AtlasOptions,
) -> Result<FamilyAtlas> {
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(Error::InvalidInput("atlas range needs 0 < t_min < t_max".into()));
    }
    if n_t < 2 {
        return Err(Error::InvalidInput("atlas needs at least 2 knots".into()));
    }
    if !(options.extension > 0.0) {
        return Err(Error::InvalidInput("extension must be positive".into()));
    }
    let report = check_hypothesis_h(nl, 1e-3 * t_min, t_max, options.hypothesis_samples)?;
    if !report.holds {
        return Err(Error::HypothesisViolation(report));
    }
    let knots_t = log_spaced(t_min, t_max, n_t);
    let mut knots: Vec<Knot> = knots_t
        .par_iter()
        .map(|&t| solve_knot(nl, t, &options.profile))
        .collect::<Result<_>>()?;

    // Each knot must cover the extended domain of both adjacent cells,
    // which can be wider than its own margin when r_t varies quickly.
    let cap = options.profile.rho_cap;
    let resolve: Vec<(usize, f64)> = (0..n_t)
        .filter_map(|k| {
            let lo = k.saturating_sub(1);
            let hi = (k + 1).min(n_t - 1);
            let need = knots[lo..=hi]
                .iter()
                .map(|kn| kn.r_t)
                .fold(0.0, f64::max)
                + options.extension
                + 0.01;
            let need = need.min(cap);
            (knots[k].profile.rho_max() < need).then(|| (k, need - knots[k].r_t))
        })
        .collect();
    let redone: Vec<(usize, Knot)> = resolve
        .par_iter()
        .map(|&(k, margin)| {
            let mut o = options.profile;
            o.zero_margin = margin.max(o.zero_margin);
            solve_knot(nl, knots_t[k], &o).map(|kn| (k, kn))
        })
        .collect::<Result<_>>()?;
    for (k, kn) in redone {
        knots[k] = kn;
    }

    let mut atlas = FamilyAtlas {
        nl: nl.clone(),
        knots_t,
        knots,
        options: *options,
        region: Region::default(),
        seeds: Vec::new(),
    };
    for (k, kn) in atlas.knots.iter().enumerate() {
        let upto = atlas.rho_ext(atlas.knots_t[k]);
        let w = jacobian_w_upto(&kn.profile, &kn.variation, upto)?;
        if !w.negative {
            return Err(Error::JacobianSign {
                t: atlas.knots_t[k],
                rho: w.max_w_at,
                w: w.max_w,
            });
        }
    }
    atlas.seeds = atlas.build_seeds()?;
    atlas.region = Region::trace(&atlas)?;
    Ok(atlas)
}

impl FamilyAtlas {
    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn options(&self) -> &AtlasOptions {
        &self.options
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.knots_t[0], *self.knots_t.last().unwrap())
    }

    pub fn knot_ts(&self) -> &[f64] {
        &self.knots_t
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    fn cell(&self, t: f64) -> Result<usize> {
        locate(&self.knots_t, t).ok_or(Error::OutOfAtlas { t, rho: f64::NAN })
    }

    /// Interpolated first zero `r(t)` from the knot values and slopes.
    pub fn r_interp(&self, t: f64) -> Result<f64> {
        let i = self.cell(t)?;
        let (a, b) = (&self.knots[i], &self.knots[i + 1]);
        Ok(hermite(self.knots_t[i], self.knots_t[i + 1], a.r_t, a.dr_dt, b.r_t, b.dr_dt, t).0)
    }

    /// Outer edge `ρ_ext(t)` of the domain `Δ`.
    pub fn rho_ext(&self, t: f64) -> f64 {
        let Ok(i) = self.cell(t) else {
            return f64::NAN;
        };
        let reach = self.knots[i]
            .profile
            .rho_max()
            .min(self.knots[i + 1].profile.rho_max());
        let r = self.r_interp(t).unwrap_or(f64::NAN);
        (r + self.options.extension).min(reach)
    }

    /// `F` and its derivatives at `ρ ≥ 0`, without domain checks beyond
    /// what the stored profiles cover.
    fn jet_nonneg(&self, t: f64, rho: f64) -> Result<FJet> {
        let i = self.cell(t)?;
        let (t0, t1) = (self.knots_t[i], self.knots_t[i + 1]);
        let (ka, kb) = (&self.knots[i], &self.knots[i + 1]);
        let oob = || Error::OutOfAtlas { t, rho };
        let pa = ka.profile.eval(rho).ok_or_else(oob)?;
        let pb = kb.profile.eval(rho).ok_or_else(oob)?;
        let va = ka.variation.eval(rho).ok_or_else(oob)?;
        let vb = kb.variation.eval(rho).ok_or_else(oob)?;
        let dt = t1 - t0;
        let (b, db) = hermite_basis((t - t0) / dt);
        let comb = |y0: f64, m0: f64, y1: f64, m1: f64| {
            (
                b[0] * y0 + b[1] * dt * m0 + b[2] * y1 + b[3] * dt * m1,
                (db[0] * y0 + db[1] * dt * m0 + db[2] * y1 + db[3] * dt * m1) / dt,
            )
        };
        let (x, x_t) = comb(pa.u, va.u, pb.u, vb.u);
        let (y, y_t) = comb(pa.uprime, va.uprime, pb.uprime, vb.uprime);
        let (x_rho, _) = comb(pa.du, va.du, pb.du, vb.du);
        let (y_rho, _) = comb(pa.duprime, va.duprime, pb.duprime, vb.duprime);
        Ok(FJet {
            x,
            y,
            x_t,
            x_rho,
            y_t,
            y_rho,
        })
    }

    /// `F` with derivatives on the evenly extended domain (no `Δ` check).
    pub(crate) fn jet_unchecked(&self, t: f64, rho: f64) -> Result<FJet> {
        if rho >= 0.0 {
            return self.jet_nonneg(t, rho);
        }
        let j = self.jet_nonneg(t, -rho)?;
        Ok(FJet {
            x: j.x,
            y: -j.y,
            x_t: j.x_t,
            x_rho: -j.x_rho,
            y_t: -j.y_t,
            y_rho: j.y_rho,
        })
    }

    /// `F(t, ρ) = (U_t(ρ), U_t'(ρ))` with its Jacobian, for `(t, ρ) ∈ Δ`.
    pub fn forward(&self, t: f64, rho: f64) -> Result<FJet> {
        let ext = self.rho_ext(t);
        if !(rho.abs() <= ext * (1.0 + 1e-12)) {
            return Err(Error::OutOfAtlas { t, rho });
        }
        self.jet_unchecked(t, rho)
    }

    /// First zero of the interpolated `ρ ↦ U_t(ρ)`.
    pub fn first_zero(&self, t: f64) -> Result<f64> {
        let mut r = self.r_interp(t)?;
        for _ in 0..50 {
            let j = self.jet_nonneg(t, r)?;
            let step = j.x / j.x_rho;
            r -= step;
            if step.abs() <= 1e-15 * r.max(1.0) {
                break;
            }
        }
        Ok(r)
    }

    fn build_seeds(&self) -> Result<Vec<(f64, f64, f64, f64)>> {
        const PER_SIDE: usize = 64;
        let mut ts = Vec::new();
        for w in self.knots_t.windows(2) {
            ts.push(w[0]);
            ts.push(0.5 * (w[0] + w[1]));
        }
        ts.push(*self.knots_t.last().unwrap());
        let mut seeds = Vec::with_capacity(ts.len() * (2 * PER_SIDE + 1));
        for t in ts {
            let ext = self.rho_ext(t);
            for k in 0..=2 * PER_SIDE {
                let rho = ext * (k as f64 / PER_SIDE as f64 - 1.0);
                let j = self.jet_unchecked(t, rho)?;
                seeds.push((j.x, j.y, t, rho));
            }
        }
        Ok(seeds)
    }

    fn seed(&self, x: f64, y: f64) -> (f64, f64) {
        let (t_min, t_max) = self.t_range();
        if x >= t_min && x <= t_max {
            let f = self.nl.f(x);
            if f > 0.0 {
                let r = -2.0 * y / f;
                if r.abs() < 0.1 {
                    return (x, r);
                }
            }
        }
        let mut best = (f64::INFINITY, t_min, 0.0);
        for &(sx, sy, t, rho) in &self.seeds {
            let d = (sx - x).powi(2) + (sy - y).powi(2);
            if d < best.0 {
                best = (d, t, rho);
            }
        }
        (best.1, best.2)
    }

    fn clamp(&self, t: f64, rho: f64) -> (f64, f64) {
        let (t_min, t_max) = self.t_range();
        let t = t.clamp(t_min, t_max);
        let ext = self.rho_ext(t);
        (t, rho.clamp(-ext, ext))
    }

    /// Damped Newton on `F(t, ρ) = (x, y)` from the seed table.
    fn newton(&self, x: f64, y: f64) -> Result<Inverse> {
        let tol = self.options.newton_tol * 1f64.max(x.abs()).max(y.abs());
        let (mut t, mut rho) = self.seed(x, y);
        let mut j = self.jet_unchecked(t, rho)?;
        let mut res = (j.x - x).hypot(j.y - y);
        let mut trace = vec![(t, rho, res)];
        for it in 0..=self.options.newton_max_iter {
            if res <= tol {
                return Ok(Inverse {
                    t,
                    rho,
                    iterations: it,
                    residual: res,
                });
            }
            let det = j.det();
            let (rx, ry) = (j.x - x, j.y - y);
            let dt = (j.y_rho * rx - j.x_rho * ry) / det;
            let drho = (-j.y_t * rx + j.x_t * ry) / det;
            if !dt.is_finite() || !drho.is_finite() {
                break;
            }
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..30 {
                let (tn, rn) = self.clamp(t - lambda * dt, rho - lambda * drho);
                if let Ok(jn) = self.jet_unchecked(tn, rn) {
                    let rn_res = (jn.x - x).hypot(jn.y - y);
                    if rn_res < res {
                        accepted = Some((tn, rn, jn, rn_res));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            let Some((tn, rn, jn, rn_res)) = accepted else {
                break;
            };
            t = tn;
            rho = rn;
            j = jn;
            res = rn_res;
            trace.push((t, rho, res));
        }
        Err(Error::NewtonFailure {
            x,
            y,
            iterations: trace.len() - 1,
            trace,
        })
    }

    /// `(T(x, y), R(x, y))`: the unique `(t, ρ) ∈ Δ` with `F(t, ρ) = (x, y)`.
    pub fn invert(&self, x: f64, y: f64) -> Result<Inverse> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput("non-finite point".into()));
        }
        let inside = self.region.contains(x, y);
        if !inside && self.region.distance(x, y) > self.region.band() {
            return Err(Error::OutsideRegion { x, y });
        }
        match self.newton(x, y) {
            Ok(inv) => Ok(inv),
            Err(e) if inside => Err(e),
            Err(_) => Err(Error::OutsideRegion { x, y }),
        }
    }

    /// JSON manifest plus one CSV per knot profile and variation.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut entries = Vec::new();
        for (k, kn) in self.knots.iter().enumerate() {
            let name = format!("profile_{k:03}.csv");
            let mut buf = Vec::new();
            kn.profile.write_csv(&mut buf)?;
            fs::write(dir.join(&name), buf)?;
            let vname = format!("variation_{k:03}.csv");
            let mut vbuf = String::from("rho,H,Hprime,Hsecond\n");
            for i in 0..kn.variation.rho.len() {
                vbuf.push_str(&format!(
                    "{:?},{:?},{:?},{:?}\n",
                    kn.variation.rho[i],
                    kn.variation.h[i],
                    kn.variation.hprime[i],
                    kn.variation.hsecond[i]
                ));
            }
            fs::write(dir.join(&vname), vbuf)?;
            entries.push(KnotManifest {
                t: self.knots_t[k],
                r_t: kn.r_t,
                dr_dt: kn.dr_dt,
                profile: name,
                variation: vname,
            });
        }
        let manifest = AtlasManifest {
            f: self.nl.label().to_string(),
            t_min: self.t_range().0,
            t_max: self.t_range().1,
            n_t: self.knots.len(),
            options: self.options,
            region_band: self.region.band(),
            knots: entries,
        };
        fs::write(dir.join("atlas.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnotManifest {
    pub t: f64,
    pub r_t: f64,
    pub dr_dt: f64,
    pub profile: String,
    pub variation: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtlasManifest {
    pub f: String,
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub options: AtlasOptions,
    pub region_band: f64,
    pub knots: Vec<KnotManifest>,
}

/// Free-function forms of [`FamilyAtlas::forward`] and [`FamilyAtlas::invert`].
pub fn forward_f(atlas: &FamilyAtlas, t: f64, rho: f64) -> Result<(f64, f64)> {
    atlas.forward(t, rho).map(|j| (j.x, j.y))
}

pub fn invert_f(atlas: &FamilyAtlas, x: f64, y: f64) -> Result<(f64, f64)> {
    atlas.invert(x, y).map(|i| (i.t, i.rho))
}
