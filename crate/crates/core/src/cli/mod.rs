//! Command-line front end. Each subcommand resolves its flags into a
//! [`RunConfig`], runs, and writes CSV/JSON outputs that embed the config.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 solver or
//! configuration error (reported on stderr as `{"error", "kind"}` JSON).

mod config;

pub use config::{parse_sweep, AtlasRange, FieldSpec, RunConfig, Task};

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::eigen::{lambda_for_radius, radius_for_lambda, EigenPair};
use crate::error::{Error, Result};
use crate::family::{build_atlas_with, AtlasOptions, CandidateSolution};
use crate::lemmas::{log_sweep, properness, run_lemma_suite, LemmaSuite, Properness};
use crate::nonlinearity::Nonlinearity;
use crate::qform::{qform_field, survey, MemberField, MeshOptions, PerturbedField, QSummary, SyntheticQ};
use crate::radial::{solve_profile, ProfileMetadata, ProfileOptions};
use crate::sphere::SpherePoint;

#[derive(Debug, Parser)]
#[command(name = "edl", version, about = "Radial candidate families and Q-form diagnostics on the 2-sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one radial profile; write profile.csv and profile.json.
    Profile {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Run the lemma checks over a log-spaced t sweep.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 16)]
        n: usize,
    },
    /// Dirichlet eigenvalue / geodesic radius table.
    Eigen {
        #[arg(long)]
        lambda: Vec<f64>,
        #[arg(long)]
        radius: Vec<f64>,
        /// Log-spaced `a:b:n`.
        #[arg(long)]
        lambda_sweep: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Survey the form Q of a field on a mesh of its disk.
    Qform {
        #[command(flatten)]
        common: Common,
        /// `member`, `perturbed:EPS[:K]`, `synthetic:zK` or `synthetic:conj`.
        #[arg(long, default_value = "member")]
        field: String,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 32)]
        knots: usize,
        /// Parameter of the member; defaults to the middle of the atlas range.
        #[arg(long)]
        member_t: Option<f64>,
        #[arg(long, default_value_t = 0.3)]
        theta: f64,
        #[arg(long, default_value_t = 0.2)]
        phi: f64,
        #[arg(long, default_value_t = 128)]
        n_rho: usize,
        #[arg(long, default_value_t = 256)]
        n_theta: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Nonlinearity: `linear:L`, `allen-cahn`, `serrin:f=1`, `constant:C`, `exp`, `table:FILE`.
    #[arg(long = "f", default_value = "linear:2")]
    pub f: String,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    fn profile_options(&self) -> ProfileOptions {
        let mut o = ProfileOptions::default();
        if let Some(r) = self.rtol {
            o.rtol = r;
        }
        if let Some(a) = self.atol {
            o.atol = a;
        }
        o
    }
}

/// Default t range: Allen–Cahn needs `t < 1`.
fn default_range(f: &str) -> (f64, f64) {
    if f == "allen-cahn" {
        (0.05, 0.95)
    } else {
        (0.25, 4.0)
    }
}

impl Command {
    /// Resolve flags and defaults into a complete configuration.
    pub fn config(&self) -> Result<RunConfig> {
        let cfg = match self {
            Command::Profile { common, t } => RunConfig {
                f: common.f.clone(),
                profile: common.profile_options(),
                out: common.out.clone(),
                task: Task::Profile { t: *t },
            },
            Command::Verify { common, t_min, t_max, n } => {
                let (a, b) = default_range(&common.f);
                RunConfig {
                    f: common.f.clone(),
                    profile: common.profile_options(),
                    out: common.out.clone(),
                    task: Task::Verify {
                        t_min: t_min.unwrap_or(a),
                        t_max: t_max.unwrap_or(b),
                        n: *n,
                    },
                }
            }
            Command::Eigen { lambda, radius, lambda_sweep, out } => {
                let mut lambdas = lambda.clone();
                if let Some(s) = lambda_sweep {
                    let (a, b, n) = parse_sweep(s)?;
                    lambdas.extend(log_sweep(a, b, n));
                }
                RunConfig {
                    f: "linear".into(),
                    profile: ProfileOptions::default(),
                    out: out.clone(),
                    task: Task::Eigen { lambdas, radii: radius.clone() },
                }
            }
            Command::Qform { common, field, t_min, t_max, knots, member_t, theta, phi, n_rho, n_theta, seed } => {
                let (a, b) = match common.f.as_str() {
                    "allen-cahn" => (0.1, 0.9),
                    _ => (0.5, 2.0),
                };
                let (t_min, t_max) = (t_min.unwrap_or(a), t_max.unwrap_or(b));
                RunConfig {
                    f: common.f.clone(),
                    profile: common.profile_options(),
                    out: common.out.clone(),
                    task: Task::Qform {
                        field: FieldSpec::parse(field)?,
                        atlas: AtlasRange { t_min, t_max, n_t: *knots },
                        mesh: MeshOptions { n_rho: *n_rho, n_theta: *n_theta, ..MeshOptions::default() },
                        center: (*theta, *phi),
                        member_t: member_t.unwrap_or(0.5 * (t_min + t_max)),
                        seed: *seed,
                    },
                }
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// What a finished run reports back to `main`.
#[derive(Debug)]
pub struct Outcome {
    pub all_pass: bool,
    /// Text for stdout.
    pub stdout: String,
}

#[derive(Serialize)]
struct ProfileOutput<'a> {
    config: &'a RunConfig,
    metadata: ProfileMetadata,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    config: &'a RunConfig,
    all_pass: bool,
    suite: &'a LemmaSuite,
    properness: std::result::Result<&'a Properness, String>,
}

#[derive(Serialize)]
struct EigenOutput<'a> {
    config: &'a RunConfig,
    rows: &'a [EigenPair],
}

#[derive(Serialize)]
struct QformOutput<'a> {
    config: &'a RunConfig,
    summary: QSummary,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// `x` with 12 significant digits in plain or scientific notation.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // exponent after rounding, so 9.9999999999999 counts as 1e1
    let sci = format!("{:.11e}", x);
    let e: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-5..12).contains(&e) {
        format!("{:.*}", (11 - e) as usize, x)
    } else {
        sci
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.task {
        Task::Profile { t } => run_profile(cfg, *t),
        Task::Verify { t_min, t_max, n } => run_verify(cfg, *t_min, *t_max, *n),
        Task::Eigen { lambdas, radii } => run_eigen(cfg, lambdas, radii),
        Task::Qform { .. } => run_qform(cfg),
    }
}

fn run_profile(cfg: &RunConfig, t: f64) -> Result<Outcome> {
    let nl = Nonlinearity::parse(&cfg.f)?;
    let p = solve_profile(&nl, t, &cfg.profile)?;
    let out = ProfileOutput { config: cfg, metadata: p.metadata() };
    if let Some(dir) = &cfg.out {
        let mut w = create(dir, "profile.csv")?;
        p.write_csv(&mut w)?;
        w.flush()?;
        write_json(dir, "profile.json", &out)?;
    }
    Ok(Outcome { all_pass: true, stdout: serde_json::to_string_pretty(&out)? + "\n" })
}

fn run_verify(cfg: &RunConfig, t_min: f64, t_max: f64, n: usize) -> Result<Outcome> {
    let nl = Nonlinearity::parse(&cfg.f)?;
    let ts = log_sweep(t_min, t_max, n);
    let suite = run_lemma_suite(&nl, &ts, &cfg.profile);
    let prop = properness(&nl, &ts, &cfg.profile).map_err(|e| e.to_string());
    let mut text = String::new();
    for c in &suite.checks {
        text.push_str(&format!("{c}\n"));
    }
    let prop_pass = matches!(&prop, Ok(p) if p.increasing);
    match &prop {
        Ok(p) => {
            let worst = p.min_jet_norm.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            let truncated = p.truncated.iter().filter(|&&x| x).count();
            text.push_str(&format!(
                "{} {:<22} t={:<10} worst={:+.6e}  min jet norm increasing; {truncated} truncated\n",
                if p.increasing { "PASS" } else { "FAIL" },
                "properness",
                "all",
                worst
            ));
        }
        Err(e) => text.push_str(&format!("FAIL {:<22} t={:<10} {e}\n", "properness", "all")),
    }
    let all_pass = suite.all_pass() && prop_pass;
    let failures = suite.failures().count() + usize::from(!prop_pass);
    text.push_str(&format!(
        "{} {}: {} checks, {failures} failures\n",
        if all_pass { "PASS" } else { "FAIL" },
        cfg.f,
        suite.checks.len() + 1
    ));
    if let Some(dir) = &cfg.out {
        let out = VerifyOutput { config: cfg, all_pass, suite: &suite, properness: prop.as_ref().map_err(Clone::clone) };
        write_json(dir, "verify.json", &out)?;
    }
    Ok(Outcome { all_pass, stdout: text })
}

fn run_eigen(cfg: &RunConfig, lambdas: &[f64], radii: &[f64]) -> Result<Outcome> {
    let mut rows = Vec::with_capacity(lambdas.len() + radii.len());
    for &l in lambdas {
        rows.push(radius_for_lambda(l)?);
    }
    for &r in radii {
        rows.push(lambda_for_radius(r)?);
    }
    let mut csv = String::from("lambda,R,alpha\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{}\n", sig12(r.lambda), sig12(r.radius), sig12(r.alpha)));
    }
    if let Some(dir) = &cfg.out {
        let mut w = create(dir, "eigen.csv")?;
        w.write_all(csv.as_bytes())?;
        w.flush()?;
        write_json(dir, "eigen.json", &EigenOutput { config: cfg, rows: &rows })?;
    }
    Ok(Outcome { all_pass: true, stdout: csv })
}

fn run_qform(cfg: &RunConfig) -> Result<Outcome> {
    let Task::Qform { field, atlas: range, mesh, center, member_t, seed } = &cfg.task else {
        unreachable!("run_qform called with another task")
    };
    let report = if field.needs_atlas() {
        let nl = Nonlinearity::parse(&cfg.f)?;
        let opts = AtlasOptions { profile: cfg.profile, ..AtlasOptions::default() };
        let atlas = build_atlas_with(&nl, range.t_min, range.t_max, range.n_t, &opts)?;
        let c = CandidateSolution::new(&atlas, SpherePoint::from_spherical(center.0, center.1), *member_t)?;
        let member = MemberField::new(c);
        match field {
            FieldSpec::Member => qform_field(&atlas, &member, mesh)?,
            FieldSpec::Perturbed { eps, power } => {
                qform_field(&atlas, &PerturbedField::new(member, *eps, *seed, *power)?, mesh)?
            }
            _ => unreachable!(),
        }
    } else {
        let src = match field {
            FieldSpec::Monomial { k } => SyntheticQ::monomial(*k),
            _ => SyntheticQ::conjugate(),
        };
        survey(&src, mesh)?
    };
    let summary = report.summary();
    let all_pass = summary.zeros.iter().all(|z| !z.violates && z.error.is_none());
    let out = QformOutput { config: cfg, summary };
    if let Some(dir) = &cfg.out {
        let mut w = create(dir, "qform.csv")?;
        report.write_csv(&mut w)?;
        w.flush()?;
        write_json(dir, "qform.json", &out)?;
    }
    let mut text = format!(
        "{}: max|Q| = {:e}, max pde residual = {:e}, identically zero: {}, zeros: {}\n",
        out.summary.label,
        out.summary.max_modulus,
        out.summary.max_pde_residual,
        out.summary.identically_zero,
        out.summary.zeros.len()
    );
    for z in &out.summary.zeros {
        let idx = z.index.map_or_else(|| "?".to_string(), |i| i.to_string());
        text.push_str(&format!(
            "  zero at rho={:.6} theta={:.6} index={idx}{}{}\n",
            z.rho,
            z.theta,
            if z.boundary { " boundary" } else { "" },
            if z.violates { " VIOLATES" } else { "" }
        ));
    }
    Ok(Outcome { all_pass, stdout: text })
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: String,
    kind: &'a str,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("EDL_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidInput(format!("EDL_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    Ok(())
}

/// Entry point shared by the binary and tests.
pub fn main_with(cli: Cli) -> ExitCode {
    let result = configure_threads().and_then(|_| cli.command.config()).and_then(|cfg| run(&cfg));
    match result {
        Ok(o) => {
            let _ = io::stdout().write_all(o.stdout.as_bytes());
            if o.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let j = ErrorJson { error: e.to_string(), kind: e.kind() };
            eprintln!("{}", serde_json::to_string(&j).unwrap_or_default());
            ExitCode::from(2)
        }
    }
}
