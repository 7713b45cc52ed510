//! Scalar fields on geodesic disks: family members, perturbed members and
//! a finite-difference wrapper around plain value functions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chart::Disk;
use crate::error::{Error, Result};
use crate::family::CandidateSolution;
use crate::sphere::{SpherePoint, Sym3, TangentVector, Vec3};

/// Value, tangent gradient and Hessian (ambient representation) at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub value: f64,
    pub gradient: Vec3,
    pub hessian: Sym3,
}

pub trait ScalarField: Sync {
    fn label(&self) -> String;
    fn domain(&self) -> Disk;
    fn jet(&self, x: SpherePoint) -> Result<FieldJet>;
}

/// A family member on its own disk.
#[derive(Debug, Clone, Copy)]
pub struct MemberField<'a> {
    pub candidate: CandidateSolution<'a>,
}

impl<'a> MemberField<'a> {
    pub fn new(candidate: CandidateSolution<'a>) -> Self {
        Self { candidate }
    }
}

impl ScalarField for MemberField<'_> {
    fn label(&self) -> String {
        format!("member(t={})", self.candidate.t())
    }

    fn domain(&self) -> Disk {
        Disk::new(self.candidate.center(), self.candidate.radius())
    }

    fn jet(&self, x: SpherePoint) -> Result<FieldJet> {
        let j = self.candidate.evaluate_extended(x)?;
        Ok(FieldJet {
            value: j.value,
            gradient: j.gradient.vec(),
            hessian: j.hessian,
        })
    }
}

/// `u = v + ε Re((X + iY)³ e^{iφ}) (Z − cos r)^k` in coordinates where the
/// member's center is the pole and `r` its radius.
///
/// `k = 1` keeps the Dirichlet data but makes the Neumann data vary along
/// the boundary; `k = 2` also keeps the Neumann data constant.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedField<'a> {
    pub member: MemberField<'a>,
    pub eps: f64,
    pub phase: f64,
    pub power: u32,
    frame: [Vec3; 3],
    cos_r: f64,
}

impl<'a> PerturbedField<'a> {
    /// Phase drawn from a ChaCha stream seeded with `seed`.
    pub fn new(member: MemberField<'a>, eps: f64, seed: u64, power: u32) -> Result<Self> {
        if !eps.is_finite() || power == 0 {
            return Err(Error::InvalidInput("perturbation needs finite eps and power >= 1".into()));
        }
        let phase = ChaCha8Rng::seed_from_u64(seed).gen_range(0.0..2.0 * PI);
        Ok(Self::with_phase(member, eps, phase, power))
    }

    pub fn with_phase(member: MemberField<'a>, eps: f64, phase: f64, power: u32) -> Self {
        let p = member.candidate.center();
        let e1 = p.any_unit_tangent();
        let e2 = p.vec().cross(e1);
        Self {
            member,
            eps,
            phase,
            power,
            frame: [e1, e2, p.vec()],
            cos_r: member.candidate.radius().cos(),
        }
    }

    /// Ambient value, gradient and Hessian of the bump polynomial.
    fn bump(&self, x: Vec3) -> (f64, Vec3, [[f64; 3]; 3]) {
        let [e1, e2, e3] = self.frame;
        let (xx, yy, zz) = (x.dot(e1), x.dot(e2), x.dot(e3));
        let (s, c) = self.phase.sin_cos();
        let a = c * (xx.powi(3) - 3.0 * xx * yy * yy) - s * (3.0 * xx * xx * yy - yy.powi(3));
        let ax = c * (3.0 * xx * xx - 3.0 * yy * yy) - s * 6.0 * xx * yy;
        let ay = -c * 6.0 * xx * yy - s * (3.0 * xx * xx - 3.0 * yy * yy);
        let axx = 6.0 * (c * xx - s * yy);
        let axy = -6.0 * (c * yy + s * xx);
        let ayy = -axx;
        let k = self.power as i32;
        let d = zz - self.cos_r;
        let g = d.powi(k);
        let g1 = k as f64 * d.powi(k - 1);
        let g2 = if k >= 2 { (k * (k - 1)) as f64 * d.powi(k - 2) } else { 0.0 };
        let local_grad = [ax * g, ay * g, a * g1];
        let local_hess = [
            [axx * g, axy * g, ax * g1],
            [axy * g, ayy * g, ay * g1],
            [ax * g1, ay * g1, a * g2],
        ];
        let grad = local_grad[0] * e1 + local_grad[1] * e2 + local_grad[2] * e3;
        // rotate the local Hessian to ambient coordinates
        let basis = [e1.0, e2.0, e3.0];
        let mut hess = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 0.0;
                for a_ in 0..3 {
                    for b_ in 0..3 {
                        v += basis[a_][i] * local_hess[a_][b_] * basis[b_][j];
                    }
                }
                hess[i][j] = v;
            }
        }
        (a * g, grad, hess)
    }
}

/// Riemannian gradient and Hessian on the unit sphere of an ambient function
/// with Euclidean gradient `g` and Hessian `h` at `x`:
/// `∇f = Π g`, `∇²f = Π h Π − ⟨x, g⟩ Π`.
pub(crate) fn restrict_to_sphere(x: Vec3, g: Vec3, h: [[f64; 3]; 3]) -> (Vec3, Sym3) {
    let proj = |i: usize, j: usize| (if i == j { 1.0 } else { 0.0 }) - x.0[i] * x.0[j];
    let radial = x.dot(g);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut v = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    v += proj(i, a) * h[a][b] * proj(b, j);
                }
            }
            out[i][j] = v - radial * proj(i, j);
        }
    }
    (g - radial * x, Sym3(out))
}

impl ScalarField for PerturbedField<'_> {
    fn label(&self) -> String {
        format!(
            "perturbed(t={}, eps={}, phase={}, power={})",
            self.member.candidate.t(),
            self.eps,
            self.phase,
            self.power
        )
    }

    fn domain(&self) -> Disk {
        self.member.domain()
    }

    fn jet(&self, x: SpherePoint) -> Result<FieldJet> {
        let base = self.member.jet(x)?;
        let (b, g, h) = self.bump(x.vec());
        let (grad, hess) = restrict_to_sphere(x.vec(), g, h);
        Ok(FieldJet {
            value: base.value + self.eps * b,
            gradient: base.gradient + self.eps * grad,
            hessian: base.hessian.plus(hess.scaled(self.eps)),
        })
    }
}

/// Gradient and Hessian of a value function by central differences in
/// geodesic normal coordinates.
pub struct NumericField<F> {
    pub value: F,
    pub domain: Disk,
    pub step: f64,
    pub name: String,
}

impl<F: Fn(SpherePoint) -> Result<f64> + Sync> NumericField<F> {
    pub fn new(name: impl Into<String>, domain: Disk, value: F) -> Self {
        Self {
            value,
            domain,
            step: 1e-4,
            name: name.into(),
        }
    }
}

impl<F: Fn(SpherePoint) -> Result<f64> + Sync> ScalarField for NumericField<F> {
    fn label(&self) -> String {
        format!("numeric({})", self.name)
    }

    fn domain(&self) -> Disk {
        self.domain
    }

    fn jet(&self, x: SpherePoint) -> Result<FieldJet> {
        let e1 = x.any_unit_tangent();
        let e2 = x.vec().cross(e1);
        let h = self.step;
        let at = |a: f64, b: f64| -> Result<f64> {
            (self.value)(x.exp(TangentVector::project(x, a * e1 + b * e2)))
        };
        let f0 = at(0.0, 0.0)?;
        let (fp1, fm1) = (at(h, 0.0)?, at(-h, 0.0)?);
        let (fp2, fm2) = (at(0.0, h)?, at(0.0, -h)?);
        let fpp = at(h, h)?;
        let fpm = at(h, -h)?;
        let fmp = at(-h, h)?;
        let fmm = at(-h, -h)?;
        let g1 = (fp1 - fm1) / (2.0 * h);
        let g2 = (fp2 - fm2) / (2.0 * h);
        let h11 = (fp1 - 2.0 * f0 + fm1) / (h * h);
        let h22 = (fp2 - 2.0 * f0 + fm2) / (h * h);
        let h12 = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        let hess = Sym3::outer(e1, e1)
            .scaled(h11)
            .plus(Sym3::outer(e2, e2).scaled(h22))
            .plus(Sym3::outer(e1, e2).scaled(2.0 * h12));
        Ok(FieldJet {
            value: f0,
            gradient: g1 * e1 + g2 * e2,
            hessian: hess,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_of_height_function() {
        // Z restricted to the sphere is cos ρ about the north pole
        let x = SpherePoint::from_spherical(0.6, 1.0).vec();
        let (g, h) = restrict_to_sphere(x, Vec3::new(0.0, 0.0, 1.0), [[0.0; 3]; 3]);
        assert!((g.norm() - 0.6f64.sin()).abs() < 1e-14);
        let e = SpherePoint::from_spherical(0.6, 1.0).any_unit_tangent();
        assert!((h.apply(e, e) + 0.6f64.cos()).abs() < 1e-14);
    }
}
