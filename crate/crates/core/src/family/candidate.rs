//! Candidate solutions `v_{q,w,a}`: radial members of the family centered
//! at `p` with parameter `t`, matched to a prescribed 1-jet `(a, w)` at `q`.

use super::FamilyAtlas;
use crate::error::{Error, Result};
use crate::sphere::{polar_frame, SpherePoint, Sym3, TangentVector};

#[derive(Debug, Clone, Copy)]
pub struct CandidateSolution<'a> {
    atlas: &'a FamilyAtlas,
    center: SpherePoint,
    t: f64,
    radius: f64,
}

/// Value, gradient and Hessian of a candidate at one point.
#[derive(Debug, Clone, Copy)]
pub struct CandidateJet {
    pub value: f64,
    pub gradient: TangentVector,
    /// Ambient representation of the Hessian on the tangent plane.
    pub hessian: Sym3,
    pub rho: f64,
    /// Radial and tangential Hessian eigenvalues `U''` and `cot ρ · U'`.
    pub radial: f64,
    pub tangential: f64,
}

impl<'a> CandidateSolution<'a> {
    /// The member with parameter `t` centered at `center`.
    pub fn new(atlas: &'a FamilyAtlas, center: SpherePoint, t: f64) -> Result<Self> {
        let radius = atlas.first_zero(t)?;
        Ok(Self {
            atlas,
            center,
            t,
            radius,
        })
    }

    pub fn center(&self) -> SpherePoint {
        self.center
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    /// Geodesic radius `r_t` of the candidate's disk.
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn atlas(&self) -> &'a FamilyAtlas {
        self.atlas
    }

    /// Evaluate anywhere in the extended disk `ρ ≤ ρ_ext(t)`.
    pub(crate) fn evaluate_extended(&self, x: SpherePoint) -> Result<CandidateJet> {
        let rho = self.center.distance(x);
        let ext = self.atlas.rho_ext(self.t);
        if rho > ext {
            return Err(Error::OutsideDisk { rho, radius: ext });
        }
        let j = self.atlas.jet_unchecked(self.t, rho)?;
        let f = self.atlas.nonlinearity().f(j.x);
        match polar_frame(self.center, x) {
            Some((rho, e_rho, e_theta)) if rho > 1e-12 => {
                let tangential = j.y / rho.tan();
                // U'' from the equation keeps the Hessian trace exactly −f(U)
                let radial = -tangential - f;
                Ok(CandidateJet {
                    value: j.x,
                    gradient: TangentVector::project(x, j.y * e_rho),
                    hessian: Sym3::outer(e_rho, e_rho)
                        .scaled(radial)
                        .plus(Sym3::outer(e_theta, e_theta).scaled(tangential)),
                    rho,
                    radial,
                    tangential,
                })
            }
            _ => {
                let e1 = x.any_unit_tangent();
                let e2 = x.vec().cross(e1);
                let half = -0.5 * f;
                Ok(CandidateJet {
                    value: j.x,
                    gradient: TangentVector::zero(x),
                    hessian: Sym3::outer(e1, e1).plus(Sym3::outer(e2, e2)).scaled(half),
                    rho,
                    radial: half,
                    tangential: half,
                })
            }
        }
    }
}

/// The candidate `v_{q,w,a}` with `v(q) = a` and `∇v(q) = w`.
pub fn candidate_at<'a>(
    atlas: &'a FamilyAtlas,
    q: SpherePoint,
    w: TangentVector,
    a: f64,
) -> Result<CandidateSolution<'a>> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidInput("a must be non-negative".into()));
    }
    candidate_for_jet(atlas, q, w, a)
}

/// As [`candidate_at`] but accepting any `a` whose jet lies in `S`; jets of
/// fields sampled on the closed disk can round to slightly negative values.
pub(crate) fn candidate_for_jet<'a>(
    atlas: &'a FamilyAtlas,
    q: SpherePoint,
    w: TangentVector,
    a: f64,
) -> Result<CandidateSolution<'a>> {
    let n = w.norm();
    if n == 0.0 {
        if a == 0.0 {
            return Err(Error::InvalidInput("(q, 0, 0) is excluded from the family".into()));
        }
        let (t_min, t_max) = atlas.t_range();
        if !(a >= t_min && a <= t_max) {
            return Err(Error::OutOfAtlas { t: a, rho: 0.0 });
        }
        return CandidateSolution::new(atlas, q, a);
    }
    let inv = atlas.invert(a, -n)?;
    let center = q.exp(w.scale(inv.rho / n));
    CandidateSolution::new(atlas, center, inv.t)
}

/// Value, gradient and Hessian of `c` at `x`, for `x` in the closed disk.
pub fn evaluate_candidate(c: &CandidateSolution<'_>, x: SpherePoint) -> Result<CandidateJet> {
    let rho = c.center.distance(x);
    if rho > c.radius * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::OutsideDisk {
            rho,
            radius: c.radius,
        });
    }
    c.evaluate_extended(x)
}
