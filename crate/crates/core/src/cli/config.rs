//! Fully resolved run configuration. Every output embeds it as JSON, and
//! that JSON deserializes back to the identical value.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::qform::MeshOptions;
use crate::radial::ProfileOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Nonlinearity spec, e.g. `linear:2`, `allen-cahn`, `serrin:f=1`, `table:path.csv`.
    pub f: String,
    pub profile: ProfileOptions,
    pub out: Option<PathBuf>,
    pub task: Task,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Task {
    Profile {
        t: f64,
    },
    Verify {
        t_min: f64,
        t_max: f64,
        n: usize,
    },
    Eigen {
        lambdas: Vec<f64>,
        radii: Vec<f64>,
    },
    Qform {
        field: FieldSpec,
        atlas: AtlasRange,
        mesh: MeshOptions,
        /// Center of the member disk as spherical angles `(θ, φ)`.
        center: (f64, f64),
        member_t: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtlasRange {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Member,
    /// Member plus `ε` times a mode-3 bump; `power = 2` keeps the boundary clamped.
    Perturbed { eps: f64, power: u32 },
    /// `P(z) = z^k` in a unit chart.
    Monomial { k: u32 },
    /// `P(z) = z̄`, the wrong-sign control.
    Conjugate,
}

impl FieldSpec {
    /// `member`, `perturbed:EPS[:K]`, `synthetic:zK` or `synthetic:conj`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown field '{s}'"));
        if s == "member" {
            return Ok(Self::Member);
        }
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "perturbed" => {
                let mut parts = rest.split(':');
                let eps: f64 = parts.next().and_then(|e| e.parse().ok()).ok_or_else(bad)?;
                let power = match parts.next() {
                    Some(k) => k.parse().map_err(|_| bad())?,
                    None => 2,
                };
                if parts.next().is_some() {
                    return Err(bad());
                }
                Ok(Self::Perturbed { eps, power })
            }
            "synthetic" if rest == "conj" => Ok(Self::Conjugate),
            "synthetic" => {
                let k: u32 = rest.strip_prefix('z').and_then(|k| k.parse().ok()).ok_or_else(bad)?;
                if k == 0 {
                    return Err(Error::InvalidInput("synthetic:z0 has no zero".into()));
                }
                Ok(Self::Monomial { k })
            }
            _ => Err(bad()),
        }
    }

    pub fn needs_atlas(&self) -> bool {
        matches!(self, Self::Member | Self::Perturbed { .. })
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        match &self.task {
            Task::Profile { t } if !(*t > 0.0) => Err(Error::InvalidInput("t must be positive".into())),
            Task::Verify { t_min, t_max, n } => {
                if !(*t_min > 0.0 && t_min < t_max) || *n < 2 {
                    return Err(Error::InvalidInput("need 0 < t_min < t_max and n >= 2".into()));
                }
                Ok(())
            }
            Task::Eigen { lambdas, radii } if lambdas.is_empty() && radii.is_empty() => {
                Err(Error::InvalidInput("give --lambda, --radius or --lambda-sweep".into()))
            }
            Task::Qform { atlas, member_t, .. } => {
                if !(atlas.t_min > 0.0 && atlas.t_min < atlas.t_max) || atlas.n_t < 2 {
                    return Err(Error::InvalidInput("need 0 < t_min < t_max and n_t >= 2".into()));
                }
                if !(*member_t >= atlas.t_min && *member_t <= atlas.t_max) {
                    return Err(Error::InvalidInput("member t outside the atlas range".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// `a:b:n`, log-spaced.
pub fn parse_sweep(s: &str) -> Result<(f64, f64, usize)> {
    let bad = || Error::InvalidInput(format!("sweep '{s}' is not a:b:n"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (a, b, n): (f64, f64, usize) = (
        a.parse().map_err(|_| bad())?,
        b.parse().map_err(|_| bad())?,
        n.parse().map_err(|_| bad())?,
    );
    if !(a > 0.0 && a < b) || n < 2 {
        return Err(Error::InvalidInput("sweep needs 0 < a < b and n >= 2".into()));
    }
    Ok((a, b, n))
}
