//! The nonlinearity `f` of `Δu + f(u) = 0` together with its derivative.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Linear { lambda: f64 },
    AllenCahn,
    Constant { c: f64 },
    Exponential,
    Table(MonotoneCubic),
    Custom { f: ScalarFn, fprime: ScalarFn },
}

/// A scalar nonlinearity with its derivative.
///
/// Evaluation outside the domain of a tabulated `f` yields `NaN`; solvers
/// turn that into [`Error::NotEvaluable`].
#[derive(Clone)]
pub struct Nonlinearity {
    label: String,
    kind: Kind,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("label", &self.label)
            .finish()
    }
}

impl Nonlinearity {
    /// `f(x) = λx`, the first-eigenvalue case.
    pub fn linear(lambda: f64) -> Self {
        Self {
            label: format!("linear:{lambda}"),
            kind: Kind::Linear { lambda },
        }
    }

    /// `f(x) = x − x³`.
    pub fn allen_cahn() -> Self {
        Self {
            label: "allen-cahn".into(),
            kind: Kind::AllenCahn,
        }
    }

    /// `f ≡ 1`, the torsion (Serrin) problem.
    pub fn serrin() -> Self {
        Self {
            label: "serrin".into(),
            kind: Kind::Constant { c: 1.0 },
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            label: format!("constant:{c}"),
            kind: Kind::Constant { c },
        }
    }

    /// `f(x) = eˣ`. Positive but violates `f ≥ x f'` for `x > 1`.
    pub fn exponential() -> Self {
        Self {
            label: "exp".into(),
            kind: Kind::Exponential,
        }
    }

    /// Tabulated `f` evaluated by monotone cubic interpolation.
    pub fn table(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let mc = MonotoneCubic::new(xs, ys).ok_or_else(|| {
            Error::InvalidInput("table needs >= 2 strictly increasing abscissae".into())
        })?;
        Ok(Self {
            label: label.into(),
            kind: Kind::Table(mc),
        })
    }

    /// Read a two-column CSV table (`x,f`, header optional).
    pub fn from_table_file(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Io(e.to_string()))?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            if rec.len() < 2 {
                return Err(Error::InvalidInput("table rows need two columns".into()));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    xs.push(x);
                    ys.push(y);
                }
                // header row
                _ if xs.is_empty() => continue,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "unparsable table row: {:?}",
                        rec
                    )))
                }
            }
        }
        Self::table(format!("table:{}", path.display()), xs, ys)
    }

    pub fn custom<F, G>(label: impl Into<String>, f: F, fprime: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            kind: Kind::Custom {
                f: Arc::new(f),
                fprime: Arc::new(fprime),
            },
        }
    }

    /// Parse a builtin name: `linear:λ`, `allen-cahn`, `serrin` (or
    /// `serrin:f=1`), `constant:c`, `exp`, `table:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = || Error::InvalidInput(format!("unknown nonlinearity '{spec}'"));
        match spec {
            "allen-cahn" => return Ok(Self::allen_cahn()),
            "serrin" | "serrin:f=1" => return Ok(Self::serrin()),
            "exp" | "exponential" => return Ok(Self::exponential()),
            _ => {}
        }
        let (head, rest) = spec.split_once(':').ok_or_else(bad)?;
        match head {
            "linear" => {
                let lambda: f64 = rest.parse().map_err(|_| bad())?;
                if !(lambda > 0.0) {
                    return Err(Error::InvalidInput("lambda must be positive".into()));
                }
                Ok(Self::linear(lambda))
            }
            "constant" => Ok(Self::constant(rest.parse().map_err(|_| bad())?)),
            "table" => Self::from_table_file(Path::new(rest)),
            _ => Err(bad()),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The eigenvalue when `f(x) = λx`.
    pub fn linear_lambda(&self) -> Option<f64> {
        match self.kind {
            Kind::Linear { lambda } => Some(lambda),
            _ => None,
        }
    }

    #[inline]
    pub fn f(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Linear { lambda } => lambda * x,
            Kind::AllenCahn => x - x * x * x,
            Kind::Constant { c } => *c,
            Kind::Exponential => x.exp(),
            Kind::Table(mc) => mc.eval(x).map_or(f64::NAN, |(v, _)| v),
            Kind::Custom { f, .. } => f(x),
        }
    }

    #[inline]
    pub fn fprime(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Linear { lambda } => *lambda,
            Kind::AllenCahn => 1.0 - 3.0 * x * x,
            Kind::Constant { .. } => 0.0,
            Kind::Exponential => x.exp(),
            Kind::Table(mc) => mc.eval(x).map_or(f64::NAN, |(_, d)| d),
            Kind::Custom { fprime, .. } => fprime(x),
        }
    }

    pub fn try_f(&self, x: f64) -> Result<f64> {
        let v = self.f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NotEvaluable { x })
        }
    }
}

/// Outcome of sampling `f > 0` and `f(x) − x f'(x) ≥ 0` on an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub holds: bool,
    pub interval: (f64, f64),
    pub samples: usize,
    pub min_f: f64,
    pub min_f_at: f64,
    pub min_margin: f64,
    pub min_margin_at: f64,
}

impl HypothesisReport {
    /// The smaller of the two margins and where it occurs.
    pub fn worst(&self) -> (f64, f64) {
        if self.min_f < self.min_margin {
            (self.min_f, self.min_f_at)
        } else {
            (self.min_margin, self.min_margin_at)
        }
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "on [{}, {}]: min f = {:.6e} at x = {}, min (f - x f') = {:.6e} at x = {}",
            self.interval.0,
            self.interval.1,
            self.min_f,
            self.min_f_at,
            self.min_margin,
            self.min_margin_at
        )
    }
}

/// Absolute slack on `f − x f' ≥ 0`; the linear case sits exactly at 0.
const MARGIN_SLACK: f64 = 1e-12;

/// Sample both inequalities of hypothesis (H) at `n` evenly spaced points.
pub fn check_hypothesis_h(nl: &Nonlinearity, a: f64, b: f64, n: usize) -> Result<HypothesisReport> {
    if !(a > 0.0 && b > a) {
        return Err(Error::InvalidInput(format!(
            "hypothesis interval must satisfy 0 < a < b, got [{a}, {b}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let mut rep = HypothesisReport {
        holds: true,
        interval: (a, b),
        samples: n,
        min_f: f64::INFINITY,
        min_f_at: a,
        min_margin: f64::INFINITY,
        min_margin_at: a,
    };
    for k in 0..n {
        let x = a + (b - a) * k as f64 / (n - 1) as f64;
        let fx = nl.f(x);
        let margin = fx - x * nl.fprime(x);
        // NaN compares false: a non-evaluable sample always fails.
        if !(fx >= rep.min_f) {
            rep.min_f = fx;
            rep.min_f_at = x;
        }
        if !(margin >= rep.min_margin) {
            rep.min_margin = margin;
            rep.min_margin_at = x;
        }
    }
    let scale = nl.f(b).abs().max(1.0);
    rep.holds = rep.min_f > 0.0 && rep.min_margin >= -MARGIN_SLACK * scale;
    Ok(rep)
}
