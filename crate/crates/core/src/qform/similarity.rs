//! Finite-difference check of the similarity structure `∂̄P = β P̄`: the
//! ratio `|∂̄P| / |P|` should stay bounded where `P` does not vanish.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::survey::QSource;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimilarityOptions {
    /// Half-width of the square patch as a fraction of the largest square
    /// inscribed in the chart disk.
    pub patch_fraction: f64,
    /// Cells per side at the coarse spacing.
    pub cells: usize,
    /// Nodes with `|P| ≤ max(rel · max|P|, abs)` are not tested.
    pub threshold_rel: f64,
    pub threshold_abs: f64,
    /// Allowed relative change of the maximal ratio when halving `h`.
    pub agreement: f64,
    /// Ratios below this are treated as finite-difference noise.
    pub fd_tolerance: f64,
}

impl Default for SimilarityOptions {
    fn default() -> Self {
        Self {
            patch_fraction: 0.9,
            cells: 48,
            threshold_rel: 1e-6,
            threshold_abs: 1e-7,
            agreement: 0.1,
            fd_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub testable: usize,
    pub max_ratio: Option<f64>,
    pub max_ratio_fine: Option<f64>,
    /// Chart position of the coarse maximum.
    pub at: Option<(f64, f64)>,
    pub h: f64,
}

impl SimilarityReport {
    pub fn vacuous(&self) -> bool {
        self.testable == 0
    }
}

struct Pass {
    testable: usize,
    max_ratio: f64,
    at: (f64, f64),
}

/// Max ratio over the coarse nodes of a square patch with spacing `h / refine`.
fn pass(src: &dyn QSource, half: f64, cells: usize, refine: usize, opts: &SimilarityOptions) -> Result<Pass> {
    let n = cells * refine;
    let h = 2.0 * half / n as f64;
    let coord = |k: usize| -half + h * k as f64;
    let grid: Vec<Complex64> = (0..=n)
        .flat_map(|a| (0..=n).map(move |b| Complex64::new(coord(b), coord(a))))
        .collect();
    let (values, moduli): (Vec<Complex64>, Vec<f64>) = grid
        .par_iter()
        .map(|&z| {
            let p = src.p_conformal(z)?;
            let m = src.p_chart_at(z)?.norm();
            Ok((p, m))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let at = |a: usize, b: usize| values[a * (n + 1) + b];
    let max_mod = moduli.iter().copied().fold(0.0, f64::max);
    let floor = (opts.threshold_rel * max_mod).max(opts.threshold_abs);
    let mut out = Pass {
        testable: 0,
        max_ratio: 0.0,
        at: (0.0, 0.0),
    };
    for a in (refine..n).step_by(refine) {
        for b in (refine..n).step_by(refine) {
            if moduli[a * (n + 1) + b] <= floor {
                continue;
            }
            let px = (at(a, b + 1) - at(a, b - 1)) / (2.0 * h);
            let py = (at(a + 1, b) - at(a - 1, b)) / (2.0 * h);
            let dbar = 0.5 * (px + Complex64::i() * py);
            let ratio = dbar.norm() / at(a, b).norm();
            out.testable += 1;
            if ratio > out.max_ratio {
                out.max_ratio = ratio;
                out.at = (coord(b), coord(a));
            }
        }
    }
    Ok(out)
}

/// Max of `|∂̄P|/|P|` over a conformal patch, compared at spacing `h` and
/// `h/2` on the same nodes. Disagreement means the patch is too coarse.
pub fn similarity_check(src: &dyn QSource, opts: &SimilarityOptions) -> Result<SimilarityReport> {
    if opts.cells < 4 || !(opts.patch_fraction > 0.0 && opts.patch_fraction <= 1.0) {
        return Err(Error::InvalidInput("similarity patch needs >= 4 cells and a fraction in (0, 1]".into()));
    }
    let edge = 2.0 * (0.5 * src.disk().radius).tan();
    let half = opts.patch_fraction * edge / std::f64::consts::SQRT_2;
    let coarse = pass(src, half, opts.cells, 1, opts)?;
    let h = 2.0 * half / opts.cells as f64;
    if coarse.testable == 0 {
        return Ok(SimilarityReport {
            testable: 0,
            max_ratio: None,
            max_ratio_fine: None,
            at: None,
            h,
        });
    }
    let fine = pass(src, half, opts.cells, 2, opts)?;
    let big = coarse.max_ratio.max(fine.max_ratio);
    if big > opts.fd_tolerance && (coarse.max_ratio - fine.max_ratio).abs() > opts.agreement * big {
        return Err(Error::PatchTooCoarse {
            coarse: coarse.max_ratio,
            fine: fine.max_ratio,
        });
    }
    Ok(SimilarityReport {
        testable: coarse.testable,
        max_ratio: Some(coarse.max_ratio),
        max_ratio_fine: Some(fine.max_ratio),
        at: Some(coarse.at),
        h,
    })
}
