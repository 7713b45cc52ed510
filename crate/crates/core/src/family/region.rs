//! The image `S = F(Δ)` represented by a closed boundary polyline.

use super::FamilyAtlas;
use crate::error::Result;

#[derive(Debug, Clone, Default)]
pub struct Region {
    vertices: Vec<(f64, f64)>,
    band: f64,
}

const EDGE_SAMPLES: usize = 256;
const T_SUBDIV: usize = 16;

impl Region {
    /// Trace `∂Δ` through `F` counterclockwise in `(t, ρ)`: `t = t_min`,
    /// `ρ = ρ_ext(t)`, `t = t_max`, `ρ = −ρ_ext(t)`.
    pub(crate) fn trace(atlas: &FamilyAtlas) -> Result<Self> {
        let (t_min, t_max) = atlas.t_range();
        let mut ts = Vec::new();
        for w in atlas.knot_ts().windows(2) {
            for k in 0..T_SUBDIV {
                ts.push(w[0] + (w[1] - w[0]) * k as f64 / T_SUBDIV as f64);
            }
        }
        ts.push(t_max);

        // each edge as a parametrized curve (t(s), ρ(s)), s ∈ [0, 1]
        let mut params: Vec<(f64, f64)> = Vec::new();
        let ext_min = atlas.rho_ext(t_min);
        for k in 0..EDGE_SAMPLES {
            params.push((t_min, ext_min * (2.0 * k as f64 / EDGE_SAMPLES as f64 - 1.0)));
        }
        for &t in &ts {
            params.push((t, atlas.rho_ext(t)));
        }
        let ext_max = atlas.rho_ext(t_max);
        for k in 1..EDGE_SAMPLES {
            params.push((t_max, ext_max * (1.0 - 2.0 * k as f64 / EDGE_SAMPLES as f64)));
        }
        for &t in ts.iter().rev() {
            params.push((t, -atlas.rho_ext(t)));
        }

        let mut vertices = Vec::with_capacity(params.len());
        for &(t, rho) in &params {
            let j = atlas.jet_unchecked(t, rho)?;
            vertices.push((j.x, j.y));
        }
        // chord sagitta: distance from the image of each parameter midpoint
        // to the chord between the images of its endpoints
        let mut sag: f64 = 0.0;
        let n = params.len();
        for i in 0..n {
            let (a, b) = (params[i], params[(i + 1) % n]);
            let mid = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
            // the ρ = ±ρ_ext edges are curves in t as well
            let mid_rho = if (a.1 - b.1).abs() > 0.0 && a.0 != b.0 {
                a.1.signum() * atlas.rho_ext(mid.0)
            } else {
                mid.1
            };
            let m = atlas.jet_unchecked(mid.0, mid_rho)?;
            sag = sag.max(seg_distance(vertices[i], vertices[(i + 1) % n], (m.x, m.y)));
        }
        Ok(Self {
            vertices,
            band: sag + 1e-8,
        })
    }

    /// Tolerance band around the polyline within which membership is
    /// decided by attempting the inversion.
    pub fn band(&self) -> f64 {
        self.band
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Winding test against the closed polyline.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let n = self.vertices.len();
        let mut winding = 0i32;
        for i in 0..n {
            let (ax, ay) = self.vertices[i];
            let (bx, by) = self.vertices[(i + 1) % n];
            let cross = (bx - ax) * (y - ay) - (x - ax) * (by - ay);
            if ay <= y {
                if by > y && cross > 0.0 {
                    winding += 1;
                }
            } else if by <= y && cross < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| seg_distance(self.vertices[i], self.vertices[(i + 1) % n], (x, y)))
            .fold(f64::INFINITY, f64::min)
    }
}

fn seg_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.0 - a.0 - s * dx).hypot(p.1 - a.1 - s * dy)
}
