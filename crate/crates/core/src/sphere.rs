//! Ambient model of the unit sphere in ℝ³: points, tangent vectors,
//! exponential and logarithm maps, and geodesic polar frames.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }
    pub fn dot(self, o: Self) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }
    pub fn cross(self, o: Self) -> Self {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Self([b * z - c * y, c * x - a * z, a * y - b * x])
    }
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
    pub fn x(self) -> f64 {
        self.0[0]
    }
    pub fn y(self) -> f64 {
        self.0[1]
    }
    pub fn z(self) -> f64 {
        self.0[2]
    }
}

impl Add for Vec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3([self * v.0[0], self * v.0[1], self * v.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Self;
    fn neg(self) -> Self {
        -1.0 * self
    }
}

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    pub fn new(v: Vec3) -> Result<Self> {
        if (v.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!(
                "sphere point must have unit norm, got {}",
                v.norm()
            )));
        }
        Ok(Self(v))
    }

    /// Project a nonzero vector onto the sphere.
    pub fn normalize(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        Ok(Self((1.0 / n) * v))
    }

    pub const fn north() -> Self {
        Self(Vec3::new(0.0, 0.0, 1.0))
    }

    /// Point at colatitude `theta` and longitude `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let s = theta.sin();
        Self(Vec3::new(s * phi.cos(), s * phi.sin(), theta.cos()))
    }

    pub fn vec(self) -> Vec3 {
        self.0
    }

    pub fn distance(self, o: Self) -> f64 {
        self.0.cross(o.0).norm().atan2(self.0.dot(o.0))
    }

    /// `exp_q(v) = cos|v| q + (sin|v|/|v|) v`.
    pub fn exp(self, v: TangentVector) -> Self {
        let n = v.v.norm();
        if n == 0.0 {
            return self;
        }
        let p = n.cos() * self.0 + (n.sin() / n) * v.v;
        // renormalize away rounding drift
        Self((1.0 / p.norm()) * p)
    }

    /// Inverse of `exp` for points other than the antipode.
    pub fn log(self, x: Self) -> Result<TangentVector> {
        let d = self.distance(x);
        let perp = x.0 - self.0.dot(x.0) * self.0;
        let n = perp.norm();
        if n == 0.0 {
            if d < 1.0 {
                return Ok(TangentVector::zero(self));
            }
            return Err(Error::Domain("log undefined at the antipode".into()));
        }
        Ok(TangentVector {
            base: self,
            v: (d / n) * perp,
        })
    }

    /// Any unit tangent vector at this point (deterministic).
    pub fn any_unit_tangent(self) -> Vec3 {
        let p = self.0;
        let axis = if p.z().abs() < 0.9 {
            Vec3::new(0.0, 0.0, 1.0)
        } else {
            Vec3::new(1.0, 0.0, 0.0)
        };
        let t = axis - p.dot(axis) * p;
        (1.0 / t.norm()) * t
    }
}

/// A vector tangent to the sphere at `base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    base: SpherePoint,
    v: Vec3,
}

impl TangentVector {
    pub fn new(base: SpherePoint, v: Vec3) -> Result<Self> {
        let scale = v.norm().max(1.0);
        if base.0.dot(v).abs() > UNIT_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "vector is not tangent: <q, w> = {}",
                base.0.dot(v)
            )));
        }
        Ok(Self { base, v })
    }

    /// Project an arbitrary ambient vector to the tangent plane.
    pub fn project(base: SpherePoint, v: Vec3) -> Self {
        Self {
            base,
            v: v - base.0.dot(v) * base.0,
        }
    }

    pub fn zero(base: SpherePoint) -> Self {
        Self {
            base,
            v: Vec3::default(),
        }
    }

    pub fn base(self) -> SpherePoint {
        self.base
    }
    pub fn vec(self) -> Vec3 {
        self.v
    }
    pub fn norm(self) -> f64 {
        self.v.norm()
    }
    pub fn scale(self, s: f64) -> Self {
        Self {
            base: self.base,
            v: s * self.v,
        }
    }
}

/// Geodesic polar frame at `x` about the center `p`: the outward radial
/// unit vector `e_ρ` and `e_θ = x × e_ρ`. `None` at the center or antipode.
pub fn polar_frame(p: SpherePoint, x: SpherePoint) -> Option<(f64, Vec3, Vec3)> {
    let rho = p.distance(x);
    let s = rho.sin();
    if s < 1e-300 {
        return None;
    }
    let e_rho = (1.0 / s) * (rho.cos() * x.0 - p.0);
    let e_rho = (1.0 / e_rho.norm()) * e_rho;
    Some((rho, e_rho, x.0.cross(e_rho)))
}

/// A symmetric bilinear form on a tangent plane, stored as an ambient
/// symmetric 3×3 matrix that annihilates the normal direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym3(pub [[f64; 3]; 3]);

impl Sym3 {
    pub fn outer(a: Vec3, b: Vec3) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = 0.5 * (a.0[i] * b.0[j] + b.0[i] * a.0[j]);
            }
        }
        Self(m)
    }

    pub fn apply(&self, a: Vec3, b: Vec3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += a.0[i] * self.0[i][j] * b.0[j];
            }
        }
        s
    }

    pub fn scaled(self, c: f64) -> Self {
        let mut m = self.0;
        m.iter_mut().flatten().for_each(|v| *v *= c);
        Self(m)
    }

    pub fn plus(self, o: Self) -> Self {
        let mut m = self.0;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += o.0[i][j];
            }
        }
        Self(m)
    }

    pub fn minus(self, o: Self) -> Self {
        self.plus(o.scaled(-1.0))
    }

    /// Components `(b11, b12, b22)` in the orthonormal tangent frame `(e1, e2)`.
    pub fn in_frame(&self, e1: Vec3, e2: Vec3) -> (f64, f64, f64) {
        (self.apply(e1, e1), self.apply(e1, e2), self.apply(e2, e2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_log_roundtrip() {
        let q = SpherePoint::from_spherical(0.7, 1.1);
        let w = TangentVector::project(q, Vec3::new(0.3, -1.2, 0.4));
        let p = q.exp(w);
        assert!((q.distance(p) - w.norm()).abs() < 1e-12);
        let back = q.log(p).unwrap();
        assert!((back.vec() - w.vec()).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_unit_and_non_tangent() {
        assert!(SpherePoint::new(Vec3::new(1.0, 1.0, 0.0)).is_err());
        let q = SpherePoint::north();
        assert!(TangentVector::new(q, Vec3::new(0.0, 0.0, 1.0)).is_err());
        assert!(TangentVector::new(q, Vec3::new(1.0, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn polar_frame_is_orthonormal() {
        let p = SpherePoint::north();
        let x = SpherePoint::from_spherical(1.0, 0.3);
        let (rho, er, et) = polar_frame(p, x).unwrap();
        assert!((rho - 1.0).abs() < 1e-14);
        assert!((er.norm() - 1.0).abs() < 1e-14);
        assert!(er.dot(et).abs() < 1e-14 && er.dot(x.vec()).abs() < 1e-14);
        // e_rho points away from p
        assert!(er.dot(p.vec()) < 0.0);
    }

    #[test]
    fn log_of_antipode_fails() {
        let q = SpherePoint::north();
        let s = SpherePoint::new(Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert!(q.log(s).is_err());
        assert_eq!(q.log(q).unwrap().norm(), 0.0);
    }
}
