use thiserror::Error;

use crate::nonlinearity::HypothesisReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("nonlinearity not evaluable at x = {x}")]
    NotEvaluable { x: f64 },

    #[error(
        "Picard iteration failed to contract on [0, {radius}] (contraction estimate {estimate:.3e}, last change {last_change:.3e})"
    )]
    PicardNoContraction {
        radius: f64,
        estimate: f64,
        last_change: f64,
    },

    #[error("integrator failure at rho = {rho}: {reason}")]
    Integrator { rho: f64, reason: String },

    #[error("no zero found up to rho = {rho_max} (U = {u}, U' = {uprime})")]
    NoZero { rho_max: f64, u: f64, uprime: f64 },

    #[error("grid mismatch between profile and variation")]
    GridMismatch,

    #[error("profile is not extended past its first zero")]
    NotExtended,

    #[error("bracket for lambda not found within [{lo:e}, {hi:e}]")]
    BracketNotFound { lo: f64, hi: f64 },

    #[error("hypothesis (H) violated: {0}")]
    HypothesisViolation(HypothesisReport),

    #[error("Jacobian sign failure at t = {t}, rho = {rho} (W = {w:e})")]
    JacobianSign { t: f64, rho: f64, w: f64 },

    #[error("query ({x}, {y}) lies outside the family region")]
    OutsideRegion { x: f64, y: f64 },

    #[error("query (t = {t}, rho = {rho}) lies outside the atlas")]
    OutOfAtlas { t: f64, rho: f64 },

    #[error("Newton inversion did not converge for ({x}, {y}) after {iterations} iterations; residual trace {trace:?}")]
    NewtonFailure {
        x: f64,
        y: f64,
        iterations: usize,
        /// `(t, ρ, residual)` after each accepted step.
        trace: Vec<(f64, f64, f64)>,
    },

    #[error("point lies outside the candidate disk (distance {rho} > radius {radius})")]
    OutsideDisk { rho: f64, radius: f64 },

    #[error("zero not isolated at this radius (|P| = {modulus:e} on the circle)")]
    NotIsolated { modulus: f64 },

    #[error("winding sum {turns} is not close to an integer; increase the sample count")]
    Undersampled { turns: f64 },

    #[error("similarity patch too coarse: ratio {coarse:e} at h, {fine:e} at h/2")]
    PatchTooCoarse { coarse: f64, fine: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Domain(_) => "domain",
            Error::NotEvaluable { .. } => "not_evaluable",
            Error::PicardNoContraction { .. } => "picard_no_contraction",
            Error::Integrator { .. } => "integrator",
            Error::NoZero { .. } => "no_zero",
            Error::GridMismatch => "grid_mismatch",
            Error::NotExtended => "not_extended",
            Error::BracketNotFound { .. } => "bracket_not_found",
            Error::HypothesisViolation(_) => "hypothesis_violation",
            Error::JacobianSign { .. } => "jacobian_sign",
            Error::OutsideRegion { .. } => "outside_region",
            Error::OutOfAtlas { .. } => "out_of_atlas",
            Error::NewtonFailure { .. } => "newton_failure",
            Error::OutsideDisk { .. } => "outside_disk",
            Error::NotIsolated { .. } => "not_isolated",
            Error::Undersampled { .. } => "undersampled",
            Error::PatchTooCoarse { .. } => "patch_too_coarse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
