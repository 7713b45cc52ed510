//! The traceless form `Q_x = ∇²u(x) − ∇²v_{x,∇u(x),u(x)}(x)` comparing a
//! field with its pointwise-matched candidate, its complex component `P`,
//! and the index of the null-direction line field around zeroes of `P`.
//!
//! Frame convention: `P = q11 − i q12`. Rotating the frame
//! counterclockwise by `θ` multiplies `P` by `e^{2iθ}`; equivalently,
//! in the rotated coordinate `z' = e^{iθ} z` the component picks up
//! `e^{−2iθ}`. Indices are computed from `P` in the conformal chart frame
//! of a disk, which is continuous across the whole disk.

mod chart;
mod fields;
mod similarity;
mod survey;

use std::fmt;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::{candidate_for_jet, FamilyAtlas};
use crate::sphere::{SpherePoint, Sym3, TangentVector, Vec3};

pub use chart::{Chart, Disk};
pub use fields::{FieldJet, MemberField, NumericField, PerturbedField, ScalarField};
pub use similarity::{similarity_check, SimilarityOptions, SimilarityReport};
pub use survey::{QSummary, 
    boundary_line_check, qform_field, survey, BoundaryReport, FieldSource, MeshOptions, QFieldReport,
    QNode, QSample, QSource, SyntheticQ, ZeroRecord,
};

/// Gradient norm below which the fixed fallback frame is used.
pub const GRADIENT_FLOOR: f64 = 1e-10;

/// A trace-free symmetric form `[[q11, q12], [q12, −q11]]` in the frame `(e1, e2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracelessForm {
    pub q11: f64,
    pub q12: f64,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl TracelessForm {
    /// Trace-free part of `b` in the frame, together with the trace.
    pub fn from_sym(b: &Sym3, e1: Vec3, e2: Vec3) -> (Self, f64) {
        let (b11, b12, b22) = b.in_frame(e1, e2);
        (
            Self {
                q11: 0.5 * (b11 - b22),
                q12: b12,
                e1,
                e2,
            },
            b11 + b22,
        )
    }

    /// `|P|`; the operator norm of the form.
    pub fn modulus(&self) -> f64 {
        self.q11.hypot(self.q12)
    }

    /// Components in the frame rotated counterclockwise by `theta`.
    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let (s2, c2) = (2.0 * theta).sin_cos();
        Self {
            q11: self.q11 * c2 + self.q12 * s2,
            q12: -self.q11 * s2 + self.q12 * c2,
            e1: c * self.e1 + s * self.e2,
            e2: -s * self.e1 + c * self.e2,
        }
    }

    /// `Q(a, b)` for tangent vectors given in the ambient space.
    pub fn apply(&self, a: Vec3, b: Vec3) -> f64 {
        let (a1, a2) = (a.dot(self.e1), a.dot(self.e2));
        let (b1, b2) = (b.dot(self.e1), b.dot(self.e2));
        self.q11 * (a1 * b1 - a2 * b2) + self.q12 * (a1 * b2 + a2 * b1)
    }

    /// Components in another orthonormal frame of the same tangent plane.
    pub fn in_frame(&self, e1: Vec3, e2: Vec3) -> Self {
        Self {
            q11: self.apply(e1, e1),
            q12: self.apply(e1, e2),
            e1,
            e2,
        }
    }
}

/// `P = q11 − i q12` in the form's own frame.
pub fn hopf_component(q: &TracelessForm) -> Complex64 {
    Complex64::new(q.q11, -q.q12)
}

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(from = "f64")]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl From<f64> for HalfInt {
    fn from(v: f64) -> Self {
        Self((2.0 * v).round() as i32)
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `Q` at one point of a field.
#[derive(Debug, Clone, Copy)]
pub struct QPoint {
    /// In the gradient frame.
    pub form: TracelessForm,
    /// Trace of the raw Hessian difference, `Δu + f(u)`.
    pub pde_residual: f64,
    pub raw: Sym3,
    pub candidate_center: SpherePoint,
    pub candidate_t: f64,
}

/// Frame `e1 = ∇u/|∇u|`, `e2 = x × e1`, with a fixed fallback at critical points.
pub fn gradient_frame(x: SpherePoint, gradient: Vec3) -> (Vec3, Vec3) {
    let n = gradient.norm();
    let e1 = if n > GRADIENT_FLOOR {
        (1.0 / n) * gradient
    } else {
        x.any_unit_tangent()
    };
    (e1, x.vec().cross(e1))
}

/// `Q_x` for the field `u` at `x`.
pub fn qform_at(atlas: &FamilyAtlas, u: &dyn ScalarField, x: SpherePoint) -> Result<QPoint> {
    let jet = u.jet(x)?;
    let w = TangentVector::project(x, jet.gradient);
    let cand = candidate_for_jet(atlas, x, w, jet.value)?;
    let v = cand.evaluate_extended(x)?;
    let raw = jet.hessian.minus(v.hessian);
    let (e1, e2) = gradient_frame(x, jet.gradient);
    let (form, trace) = TracelessForm::from_sym(&raw, e1, e2);
    Ok(QPoint {
        form,
        pde_residual: trace,
        raw,
        candidate_center: cand.center(),
        candidate_t: cand.t(),
    })
}

/// Result of a winding computation around a circle in the chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub index: HalfInt,
    pub winding: i32,
    pub min_modulus: f64,
    /// A non-negative index contradicts the expected negative sign.
    pub violates: bool,
}

/// Index `−(winding of P)/2` of the null-direction line field of `P` around
/// the chart circle `|z − z0| = radius`.
///
/// `floor` is the smallest admissible `|P|` on the circle.
pub fn null_direction_index<F>(
    p: F,
    z0: Complex64,
    radius: f64,
    n_samples: usize,
    floor: f64,
) -> Result<IndexReport>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if n_samples < 8 || !(radius > 0.0) {
        return Err(Error::InvalidInput("index circle needs radius > 0 and >= 8 samples".into()));
    }
    let mut values = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let phi = 2.0 * PI * k as f64 / n_samples as f64;
        values.push(p(z0 + Complex64::from_polar(radius, phi))?);
    }
    let min_modulus = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    if !(min_modulus > floor) {
        return Err(Error::NotIsolated {
            modulus: min_modulus,
        });
    }
    let mut total = 0.0;
    let mut largest: f64 = 0.0;
    for k in 0..n_samples {
        let d = (values[(k + 1) % n_samples] / values[k]).arg();
        largest = largest.max(d.abs());
        total += d;
    }
    if largest > 0.75 * PI {
        return Err(Error::Undersampled {
            turns: total / (2.0 * PI),
        });
    }
    let turns = total / (2.0 * PI);
    let winding = turns.round();
    if (turns - winding).abs() > 1e-6 {
        return Err(Error::Undersampled { turns });
    }
    let winding = winding as i32;
    Ok(IndexReport {
        index: HalfInt(-winding),
        winding,
        min_modulus,
        violates: winding <= 0,
    })
}
