//! Sampling `Q` over a geodesic polar mesh, zero detection and the
//! boundary line-of-curvature check.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::{Chart, Disk};
use super::fields::ScalarField;
use super::{hopf_component, null_direction_index, qform_at, HalfInt, TracelessForm};
use crate::error::{Error, Result};
use crate::family::FamilyAtlas;
use crate::sphere::SpherePoint;

/// `Q` at one point, with `P` expressed in the chart frame.
#[derive(Debug, Clone, Copy)]
pub struct QSample {
    pub form: TracelessForm,
    pub p_chart: Complex64,
    pub pde_residual: f64,
}

/// Anything that yields `Q` on a disk.
pub trait QSource: Sync {
    fn label(&self) -> String;
    fn disk(&self) -> Disk;
    fn sample(&self, x: SpherePoint) -> Result<QSample>;

    fn p_chart_at(&self, z: Complex64) -> Result<Complex64> {
        self.sample(self.disk().chart.point(z)).map(|s| s.p_chart)
    }

    /// `P = Q(∂z, ∂z)` with the conformal factor restored.
    fn p_conformal(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.p_chart_at(z)? * (0.25 * Chart::conformal_factor(z)))
    }
}

/// `Q` of a scalar field against a family atlas.
pub struct FieldSource<'a> {
    pub atlas: &'a FamilyAtlas,
    pub field: &'a dyn ScalarField,
}

impl QSource for FieldSource<'_> {
    fn label(&self) -> String {
        self.field.label()
    }

    fn disk(&self) -> Disk {
        self.field.domain()
    }

    fn sample(&self, x: SpherePoint) -> Result<QSample> {
        let q = qform_at(self.atlas, self.field, x)?;
        let (c1, c2) = self.disk().chart.frame(x);
        Ok(QSample {
            form: q.form,
            p_chart: hopf_component(&q.form.in_frame(c1, c2)),
            pde_residual: q.pde_residual,
        })
    }
}

type PFn = Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A prescribed `P(z)` on a chart disk, bypassing any scalar field.
pub struct SyntheticQ {
    pub name: String,
    disk: Disk,
    p: PFn,
}

impl SyntheticQ {
    /// `P` on the chart disk `|z| ≤ chart_radius` about the north pole.
    pub fn new<F>(name: impl Into<String>, chart_radius: f64, p: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            disk: Disk::new(SpherePoint::north(), 2.0 * (0.5 * chart_radius).atan()),
            p: Box::new(p),
        }
    }

    pub fn monomial(k: u32) -> Self {
        Self::new(format!("z^{k}"), 1.0, move |z| z.powu(k))
    }

    /// `∏ (z − a_i)`.
    pub fn roots(roots: Vec<Complex64>) -> Self {
        let name = format!("roots{roots:?}");
        Self::new(name, 1.0, move |z| roots.iter().fold(Complex64::new(1.0, 0.0), |acc, a| acc * (z - a)))
    }

    /// The anti-holomorphic control `P(z) = z̄`.
    pub fn conjugate() -> Self {
        Self::new("conj(z)", 1.0, |z| z.conj())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.p)(z)
    }
}

impl QSource for SyntheticQ {
    fn label(&self) -> String {
        format!("synthetic({})", self.name)
    }

    fn disk(&self) -> Disk {
        self.disk
    }

    fn sample(&self, x: SpherePoint) -> Result<QSample> {
        let chart = self.disk.chart;
        let p = (self.p)(chart.z(x));
        let (e1, e2) = chart.frame(x);
        Ok(QSample {
            form: TracelessForm {
                q11: p.re,
                q12: -p.im,
                e1,
                e2,
            },
            p_chart: p,
            pde_residual: 0.0,
        })
    }

    fn p_chart_at(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.p)(z))
    }

    /// The prescribed function is taken to be `P` itself.
    fn p_conformal(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.p)(z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeshOptions {
    pub n_rho: usize,
    pub n_theta: usize,
    /// Nodes with `|Q| < zero_rel · max|Q|` are zero candidates.
    pub zero_rel: f64,
    /// `max|Q|` at or below this means `Q` vanishes identically.
    pub identically_zero_abs: f64,
    /// Radius of the confirmation circle in mesh cells.
    pub confirm_cells: f64,
    pub index_samples: usize,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self {
            n_rho: 128,
            n_theta: 256,
            zero_rel: 1e-9,
            identically_zero_abs: 1e-7,
            confirm_cells: 4.0,
            index_samples: 720,
        }
    }
}

impl MeshOptions {
    fn validate(&self) -> Result<()> {
        if self.n_rho < 2 || self.n_theta < 4 {
            return Err(Error::InvalidInput("mesh needs n_rho >= 2 and n_theta >= 4".into()));
        }
        if !(self.zero_rel > 0.0 && self.identically_zero_abs > 0.0 && self.confirm_cells > 0.0) {
            return Err(Error::InvalidInput("mesh thresholds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QNode {
    pub i: usize,
    pub j: usize,
    pub rho: f64,
    pub theta: f64,
    pub point: [f64; 3],
    pub q11: f64,
    pub q12: f64,
    pub modulus: f64,
    pub p_re: f64,
    pub p_im: f64,
    pub pde_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub node: usize,
    pub rho: f64,
    pub theta: f64,
    pub modulus: f64,
    pub boundary: bool,
    pub index: Option<HalfInt>,
    pub winding: Option<i32>,
    pub violates: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QFieldReport {
    pub label: String,
    pub radius: f64,
    pub mesh: MeshOptions,
    pub nodes: Vec<QNode>,
    pub max_modulus: f64,
    pub max_pde_residual: f64,
    pub identically_zero: bool,
    pub zeros: Vec<ZeroRecord>,
}

/// Summary without the per-node data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QSummary {
    pub label: String,
    pub radius: f64,
    pub mesh: MeshOptions,
    pub max_modulus: f64,
    pub max_pde_residual: f64,
    pub identically_zero: bool,
    pub zeros: Vec<ZeroRecord>,
}

impl QFieldReport {
    /// Index of node `(i, j)`; the center is node 0 for every `j`.
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        if i == 0 {
            0
        } else {
            1 + (i - 1) * self.mesh.n_theta + j % self.mesh.n_theta
        }
    }

    /// Outermost ring, on the boundary circle.
    pub fn boundary_ring(&self) -> &[QNode] {
        let start = self.node_index(self.mesh.n_rho, 0);
        &self.nodes[start..start + self.mesh.n_theta]
    }

    fn neighbours(&self, k: usize) -> Vec<usize> {
        let (n_rho, n_theta) = (self.mesh.n_rho, self.mesh.n_theta);
        if k == 0 {
            return (0..n_theta).map(|j| self.node_index(1, j)).collect();
        }
        let (i, j) = (self.nodes[k].i, self.nodes[k].j);
        let mut out = vec![
            self.node_index(i - 1, j),
            self.node_index(i, j + 1),
            self.node_index(i, j + n_theta - 1),
        ];
        if i < n_rho {
            out.push(self.node_index(i + 1, j));
        }
        out
    }

    pub fn summary(&self) -> QSummary {
        QSummary {
            label: self.label.clone(),
            radius: self.radius,
            mesh: self.mesh,
            max_modulus: self.max_modulus,
            max_pde_residual: self.max_pde_residual,
            identically_zero: self.identically_zero,
            zeros: self.zeros.clone(),
        }
    }

    /// CSV with node coordinates, `q11, q12, |Q|` and the PDE residual.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "i,j,rho,theta,x,y,z,q11,q12,modulus,p_re,p_im,pde_residual")?;
        for n in &self.nodes {
            writeln!(
                w,
                "{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                n.i,
                n.j,
                n.rho,
                n.theta,
                n.point[0],
                n.point[1],
                n.point[2],
                n.q11,
                n.q12,
                n.modulus,
                n.p_re,
                n.p_im,
                n.pde_residual
            )?;
        }
        Ok(())
    }
}

/// Sample `src` on the geodesic polar mesh of its disk and classify zeroes.
pub fn survey(src: &dyn QSource, mesh: &MeshOptions) -> Result<QFieldReport> {
    mesh.validate()?;
    let disk = src.disk();
    let chart = disk.chart;
    let mut coords = vec![(0usize, 0usize, 0.0, 0.0)];
    for i in 1..=mesh.n_rho {
        let rho = disk.radius * i as f64 / mesh.n_rho as f64;
        for j in 0..mesh.n_theta {
            coords.push((i, j, rho, 2.0 * PI * j as f64 / mesh.n_theta as f64));
        }
    }
    let nodes: Vec<QNode> = coords
        .par_iter()
        .map(|&(i, j, rho, theta)| {
            let x = chart.from_polar(rho, theta);
            let s = src.sample(x)?;
            Ok(QNode {
                i,
                j,
                rho,
                theta,
                point: x.vec().0,
                q11: s.form.q11,
                q12: s.form.q12,
                modulus: s.form.modulus(),
                p_re: s.p_chart.re,
                p_im: s.p_chart.im,
                pde_residual: s.pde_residual,
            })
        })
        .collect::<Result<_>>()?;
    let max_modulus = nodes.iter().map(|n| n.modulus).fold(0.0, f64::max);
    let max_pde_residual = nodes.iter().map(|n| n.pde_residual.abs()).fold(0.0, f64::max);
    let identically_zero = max_modulus <= mesh.identically_zero_abs;
    let mut report = QFieldReport {
        label: src.label(),
        radius: disk.radius,
        mesh: *mesh,
        nodes,
        max_modulus,
        max_pde_residual,
        identically_zero,
        zeros: Vec::new(),
    };
    if identically_zero {
        return Ok(report);
    }
    let threshold = mesh.zero_rel * max_modulus;
    let d_rho = disk.radius / mesh.n_rho as f64;
    let chart_edge = 2.0 * (0.5 * disk.radius).tan();
    let candidates: Vec<usize> = (0..report.nodes.len())
        .filter(|&k| {
            let m = report.nodes[k].modulus;
            m < threshold && report.neighbours(k).iter().all(|&n| report.nodes[n].modulus >= m)
        })
        .collect();
    let zeros = candidates
        .par_iter()
        .map(|&k| {
            let n = report.nodes[k];
            let z0 = Complex64::from_polar(2.0 * (0.5 * n.rho).tan(), n.theta);
            let radius = mesh.confirm_cells * d_rho * (1.0 + 0.25 * z0.norm_sqr());
            let mut rec = ZeroRecord {
                node: k,
                rho: n.rho,
                theta: n.theta,
                modulus: n.modulus,
                boundary: n.i == mesh.n_rho,
                index: None,
                winding: None,
                violates: false,
                error: None,
            };
            if z0.norm() + radius > chart_edge {
                rec.boundary = true;
                rec.error = Some("confirmation circle leaves the domain".into());
                return rec;
            }
            match null_direction_index(|z| src.p_chart_at(z), z0, radius, mesh.index_samples, threshold) {
                Ok(ix) => {
                    rec.index = Some(ix.index);
                    rec.winding = Some(ix.winding);
                    rec.violates = ix.violates;
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect();
    report.zeros = zeros;
    Ok(report)
}

/// [`survey`] of `Q` for the field `u` against `atlas`.
pub fn qform_field(atlas: &FamilyAtlas, u: &dyn ScalarField, mesh: &MeshOptions) -> Result<QFieldReport> {
    survey(&FieldSource { atlas, field: u }, mesh)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    /// `max |Q(τ, η)|` over the boundary nodes.
    pub max_off_diagonal: f64,
    pub at_theta: f64,
    pub samples: usize,
}

/// Off-diagonal part of `Q` in the (tangent, outward normal) frame along
/// the boundary ring of `report`.
pub fn boundary_line_check(report: &QFieldReport, u: &dyn ScalarField) -> Result<BoundaryReport> {
    let disk = u.domain();
    let mut out = BoundaryReport {
        max_off_diagonal: 0.0,
        at_theta: 0.0,
        samples: 0,
    };
    for n in report.boundary_ring() {
        let x = SpherePoint::normalize(crate::sphere::Vec3(n.point))?;
        let (eta, tau) = disk
            .normal_tangent(x)
            .ok_or_else(|| Error::Domain("boundary node at the disk center".into()))?;
        let (c1, c2) = disk.chart.frame(x);
        let form = TracelessForm {
            q11: n.p_re,
            q12: -n.p_im,
            e1: c1,
            e2: c2,
        };
        let v = form.apply(tau, eta).abs();
        if v > out.max_off_diagonal {
            out.max_off_diagonal = v;
            out.at_theta = n.theta;
        }
        out.samples += 1;
    }
    Ok(out)
}
