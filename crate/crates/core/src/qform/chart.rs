//! Geodesic disks and their conformal chart `z = 2 tan(ρ/2) e^{iθ}`.

use num_complex::Complex64;

use crate::sphere::{polar_frame, SpherePoint, TangentVector, Vec3};

/// Conformal chart centered at `center`; `θ = 0` along `e_ref`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    center: SpherePoint,
    e_ref: Vec3,
    e_perp: Vec3,
}

impl Chart {
    pub fn new(center: SpherePoint) -> Self {
        let e_ref = center.any_unit_tangent();
        Self {
            center,
            e_ref,
            e_perp: center.vec().cross(e_ref),
        }
    }

    pub fn center(&self) -> SpherePoint {
        self.center
    }

    /// Geodesic polar coordinates `(ρ, θ)` of `x`.
    pub fn polar(&self, x: SpherePoint) -> (f64, f64) {
        let rho = self.center.distance(x);
        let v = x.vec() - self.center.vec().dot(x.vec()) * self.center.vec();
        let theta = if v.norm() == 0.0 {
            0.0
        } else {
            v.dot(self.e_perp).atan2(v.dot(self.e_ref))
        };
        (rho, theta)
    }

    pub fn from_polar(&self, rho: f64, theta: f64) -> SpherePoint {
        let (s, c) = theta.sin_cos();
        let dir = c * self.e_ref + s * self.e_perp;
        self.center.exp(TangentVector::project(self.center, dir).scale(rho))
    }

    pub fn z(&self, x: SpherePoint) -> Complex64 {
        let (rho, theta) = self.polar(x);
        Complex64::from_polar(2.0 * (0.5 * rho).tan(), theta)
    }

    pub fn point(&self, z: Complex64) -> SpherePoint {
        self.from_polar(2.0 * (0.5 * z.norm()).atan(), z.arg())
    }

    /// Unit vectors along `∂/∂Re z` and `∂/∂Im z` at `x`.
    pub fn frame(&self, x: SpherePoint) -> (Vec3, Vec3) {
        match polar_frame(self.center, x) {
            Some((rho, e_rho, e_theta)) if rho > 1e-12 => {
                let (_, theta) = self.polar(x);
                let (s, c) = theta.sin_cos();
                let e1 = c * e_rho - s * e_theta;
                (e1, x.vec().cross(e1))
            }
            _ => (self.e_ref, self.e_perp),
        }
    }

    /// Conformal factor `λ` with `g = λ |dz|²`.
    pub fn conformal_factor(z: Complex64) -> f64 {
        (1.0 + 0.25 * z.norm_sqr()).powi(-2)
    }
}

/// A closed geodesic disk with its chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub chart: Chart,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: SpherePoint, radius: f64) -> Self {
        Self {
            chart: Chart::new(center),
            radius,
        }
    }

    pub fn center(&self) -> SpherePoint {
        self.chart.center()
    }

    pub fn contains(&self, x: SpherePoint) -> bool {
        self.center().distance(x) <= self.radius * (1.0 + 1e-12)
    }

    /// Boundary parametrization by the polar angle.
    pub fn boundary(&self, theta: f64) -> SpherePoint {
        self.chart.from_polar(self.radius, theta)
    }

    /// Outward unit normal `η` and counterclockwise unit tangent `τ` at a
    /// point of the boundary circle.
    pub fn normal_tangent(&self, x: SpherePoint) -> Option<(Vec3, Vec3)> {
        polar_frame(self.center(), x).map(|(_, eta, tau)| (eta, tau))
    }
}
