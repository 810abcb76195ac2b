//! Batch front end: resolves a [`RunConfig`], dispatches to the engine and
//! tensor estimators, and writes a JSON [`RunReport`] plus optional CSV grid.
//!
//! A `VIOLATION` verdict is a completed run; only configuration and numerical
//! failures are errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::engine::scenarios::{
    b0k_k, bk_k, bk_sp, certify_schatten_legs, evaluate, hs_hs, SchattenCertificate,
};
use crate::engine::suites::{
    finite_dim_suite_with, schur_grid, schur_suite_with, FiniteDimConfig, FiniteDimSummary,
    LimitRule, SchurSuiteSummary,
};
use crate::engine::{BiregularityVerdict, LimitGrid, VerdictStatus, DEFAULT_EPS, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::operators::SchattenExponent;
use crate::random::{random_matrix, stream};
use crate::report::write_grid_csv;
use crate::tensor::{projective_estimate, ProjectiveNormEstimate, TensorElement};

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "BIREGULAR_THREADS";

const SCHATTEN_SAMPLES: usize = 16;
const PROJNORM_ITERS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    HsHs,
    BkK,
    B0kK,
    BkSp,
    Schur,
    FiniteDim,
    Projnorm,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::HsHs => "hs-hs",
            ScenarioKind::BkK => "bk-k",
            ScenarioKind::B0kK => "b0k-k",
            ScenarioKind::BkSp => "bk-sp",
            ScenarioKind::Schur => "schur",
            ScenarioKind::FiniteDim => "finite-dim",
            ScenarioKind::Projnorm => "projnorm",
        }
    }

    fn has_grid(&self) -> bool {
        !matches!(self, ScenarioKind::FiniteDim | ScenarioKind::Projnorm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Fully resolved run parameters, echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub n: usize,
    pub dim: usize,
    pub p: SchattenExponent,
    pub q: SchattenExponent,
    pub window: usize,
    pub eps: f64,
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Configuration with the scenario's catalog defaults.
    pub fn defaults(scenario: ScenarioKind) -> Self {
        let one = SchattenExponent::TRACE;
        let two = SchattenExponent::HILBERT_SCHMIDT;
        let (n, dim, p, trials) = match scenario {
            ScenarioKind::HsHs | ScenarioKind::BkK | ScenarioKind::B0kK => (64, 64, two, 1),
            ScenarioKind::BkSp => (64, 64, one, 1),
            ScenarioKind::Schur => (48, 48, two, 100),
            ScenarioKind::FiniteDim => (64, 4, two, 200),
            ScenarioKind::Projnorm => (64, 6, two, 64),
        };
        let window = match scenario {
            ScenarioKind::Schur => LimitRule::schur_default(n).window,
            _ => DEFAULT_WINDOW,
        };
        Self {
            scenario,
            n,
            dim,
            p,
            q: p,
            window,
            eps: DEFAULT_EPS,
            tol: 10.0 * DEFAULT_EPS,
            seed: 0,
            trials,
            format: OutputFormat::Json,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!(
                "--n must be at least 2, got {}",
                self.n
            )));
        }
        if self.dim == 0 {
            return Err(Error::invalid("--dim must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("--trials must be positive"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid(format!(
                "--eps must be a positive real, got {}",
                self.eps
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid(format!(
                "--tol must be a positive real, got {}",
                self.tol
            )));
        }
        let uses_window = !matches!(self.scenario, ScenarioKind::Projnorm);
        if uses_window && (self.window == 0 || 2 * self.window >= self.n) {
            return Err(Error::invalid(format!(
                "--window must satisfy 1 <= window < N/2 (window {}, N {})",
                self.window, self.n
            )));
        }
        if self.format == OutputFormat::Csv && !self.scenario.has_grid() {
            return Err(Error::invalid(format!(
                "csv output needs a grid scenario; {} has none",
                self.scenario.name()
            )));
        }
        Ok(())
    }

    fn rule(&self) -> LimitRule {
        LimitRule {
            window: self.window,
            eps: self.eps,
            tol: self.tol,
        }
    }
}

/// Scenario-specific result carried by a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Grid {
        grid: LimitGrid,
        /// Present for the Schatten-leg scenario.
        schatten_certificate: Option<SchattenCertificate>,
    },
    SchurSuite {
        summary: SchurSuiteSummary,
        /// Grid of the first seed.
        grid: LimitGrid,
    },
    FiniteDim {
        summary: FiniteDimSummary,
    },
    Projnorm {
        estimate: ProjectiveNormEstimate,
    },
}

impl Outcome {
    pub fn grid(&self) -> Option<&LimitGrid> {
        match self {
            Outcome::Grid { grid, .. } | Outcome::SchurSuite { grid, .. } => Some(grid),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: RunConfig,
    pub outcome: Outcome,
    /// Grid verdict, or for suites the first violating, else first
    /// inconclusive, else first trial's verdict.
    pub verdict: Option<BiregularityVerdict>,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::invalid(format!("report serialization failed: {e}")))
    }
}

fn representative<'a>(
    verdicts: impl Iterator<Item = &'a BiregularityVerdict> + Clone,
) -> Option<BiregularityVerdict> {
    let pick = |s| verdicts.clone().find(|v| v.status == s).cloned();
    pick(VerdictStatus::Violation)
        .or_else(|| pick(VerdictStatus::Inconclusive))
        .or_else(|| verdicts.clone().next().cloned())
}

/// Runs one configuration.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let c = config;
    let (outcome, verdict) = match c.scenario {
        ScenarioKind::HsHs => {
            let (grid, v) = evaluate(&hs_hs(c.n)?, c.n, c.window, c.eps, c.tol)?;
            (grid_outcome(grid, None), Some(v))
        }
        ScenarioKind::BkK | ScenarioKind::B0kK => {
            let s = if c.scenario == ScenarioKind::BkK {
                bk_k(c.n)?
            } else {
                b0k_k(c.n)?
            };
            s.certify_families(c.n)?;
            let (grid, v) = evaluate(&s, c.n, c.window, c.eps, c.tol)?;
            (grid_outcome(grid, None), Some(v))
        }
        ScenarioKind::BkSp => {
            if c.p != c.q {
                return Err(Error::invalid(
                    "bk-sp measures both legs in one exponent; set --p equal to --q",
                ));
            }
            let s = bk_sp(c.n, c.p)?;
            let cert = certify_schatten_legs(&s, c.n, c.p, SCHATTEN_SAMPLES, c.seed)?;
            let (grid, v) = evaluate(&s, c.n, c.window, c.eps, c.tol)?;
            (grid_outcome(grid, Some(cert)), Some(v))
        }
        ScenarioKind::Schur => {
            let summary = schur_suite_with(c.n, c.trials, c.seed, c.rule())?;
            let grid = schur_grid(c.n, c.seed, c.rule())?;
            let v = representative(summary.trials.iter().map(|t| &t.verdict));
            (Outcome::SchurSuite { summary, grid }, v)
        }
        ScenarioKind::FiniteDim => {
            let mut cfg = FiniteDimConfig::new(c.dim, c.trials, c.seed);
            cfg.n = c.n;
            cfg.window = c.window;
            cfg.eps = c.eps;
            cfg.tol = c.tol;
            let summary = finite_dim_suite_with(&cfg)?;
            let v = representative(summary.trials.iter().map(|t| &t.verdict));
            (Outcome::FiniteDim { summary }, v)
        }
        ScenarioKind::Projnorm => {
            let mut rng = stream(c.seed, 0);
            let u = TensorElement::new(random_matrix(&mut rng, c.dim, c.dim), c.p, c.q)?;
            let estimate = projective_estimate(&u, c.dim, PROJNORM_ITERS, c.trials, c.seed)?;
            (Outcome::Projnorm { estimate }, None)
        }
    };
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        outcome,
        verdict,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn grid_outcome(grid: LimitGrid, schatten_certificate: Option<SchattenCertificate>) -> Outcome {
    Outcome::Grid {
        grid,
        schatten_certificate,
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Sidecar path for the JSON report of a CSV run: `<out>.report.json`.
pub fn report_sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".report.json");
    PathBuf::from(name)
}

/// Writes the report per the configured format and destination. JSON goes
/// to `--out` or stdout; CSV writes the grid to `--out` (or stdout) and the
/// report to `<out>.report.json` (or stderr).
pub fn write_outputs(
    report: &RunReport,
    stdout: &mut impl Write,
    stderr: &mut impl Write,
) -> Result<()> {
    let json = report.to_json()? + "\n";
    let console = |w: &mut dyn Write, text: &[u8]| {
        w.write_all(text)
            .map_err(|e| io_error(Path::new("<console>"), e))
    };
    match (report.config.format, &report.config.out) {
        (OutputFormat::Json, None) => console(stdout, json.as_bytes()),
        (OutputFormat::Json, Some(path)) => fs::write(path, json).map_err(|e| io_error(path, e)),
        (OutputFormat::Csv, dest) => {
            let grid = report
                .outcome
                .grid()
                .ok_or_else(|| Error::invalid("csv output needs a grid scenario"))?;
            match dest {
                None => {
                    write_grid_csv(grid, &mut *stdout)?;
                    console(stderr, json.as_bytes())
                }
                Some(path) => {
                    let file = fs::File::create(path).map_err(|e| io_error(path, e))?;
                    write_grid_csv(grid, file)?;
                    let sidecar = report_sidecar(path);
                    fs::write(&sidecar, json).map_err(|e| io_error(&sidecar, e))
                }
            }
        }
    }
}

/// One-line human summary.
pub fn summary_line(report: &RunReport) -> String {
    let name = report.config.scenario.name();
    match (&report.verdict, &report.outcome) {
        (Some(v), _) => match v.discrepancy {
            Some(d) => format!("{name}: {} (discrepancy {d:e})", v.status),
            None => format!("{name}: {}", v.status),
        },
        (None, Outcome::Projnorm { estimate }) => format!(
            "{name}: {:.12} <= projective norm <= {:.12}",
            estimate.lower, estimate.upper
        ),
        (None, _) => format!("{name}: completed"),
    }
}

/// One catalog entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    /// The statement the scenario reproduces.
    pub theorem: String,
    pub description: String,
    pub defaults: RunConfig,
}

pub fn catalog() -> Vec<CatalogEntry> {
    let entry = |kind: ScenarioKind, theorem: &str, description: &str| CatalogEntry {
        name: kind.name().to_string(),
        theorem: theorem.to_string(),
        description: description.to_string(),
        defaults: RunConfig::defaults(kind),
    };
    vec![
        entry(
            ScenarioKind::HsHs,
            "Theorem: the projective tensor product of two Hilbert-Schmidt classes is not Arens regular",
            "matrix units E_{i1}, E_{1j} under composition with the triangular Riesz form; grid = [j <= i]",
        ),
        entry(
            ScenarioKind::BkK,
            "Theorem: the projective tensor product of B(K) and K(H) is not Arens regular",
            "rank-one superoperators against E_{i1}, E_11 with the point form <T(A), E_11>; grid = [i <= j]",
        ),
        entry(
            ScenarioKind::B0kK,
            "Corollary: the same failure for compact superoperators, since the sequences are finite rank",
            "bk-k sequences regarded as compact superoperators; grid identical to bk-k",
        ),
        entry(
            ScenarioKind::BkSp,
            "Corollary: the same failure with Schatten-p legs, 1 <= p <= 2, since S_p is contained in S_2",
            "bk-k sequences with S_p norm certificates on the matrix leg",
        ),
        entry(
            ScenarioKind::Schur,
            "Theorem: the projective tensor square of S_2 with the Schur product is Arens regular",
            "seeded Schur-product grids with weakly null families; counts verdicts over --trials seeds",
        ),
        entry(
            ScenarioKind::FiniteDim,
            "Proposition: every bilinear form on finite-dimensional algebras is biregular",
            "seeded norm-convergent families on dim x dim matrices; every trial must agree with the limit-point value",
        ),
        entry(
            ScenarioKind::Projnorm,
            "Projective tensor norm: a cross norm, equal to the trace-class norm on Hilbert legs",
            "upper bound by decomposition optimization, lower bound by certified dual forms",
        ),
    ]
}

/// Text rendering of the catalog.
pub fn catalog_text() -> String {
    let mut out = String::new();
    for e in catalog() {
        let d = &e.defaults;
        out.push_str(&format!(
            "{:<11} {}\n            {}\n            defaults: n={} dim={} p={} q={} window={} eps={:e} tol={:e} trials={}\n",
            e.name, e.theorem, e.description, d.n, d.dim, d.p, d.q, d.window, d.eps, d.tol, d.trials
        ));
    }
    out
}

#[derive(Debug, Parser)]
#[command(
    name = "biregular",
    version,
    about = "Biregularity grids, Schatten-class toolkit and projective tensor norms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario or suite.
    Run(RunArgs),
    /// List the scenario catalog.
    List {
        /// Emit the catalog as JSON.
        #[arg(long)]
        json: bool,
    },
}

/// Unset options take the scenario's catalog defaults.
#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioKind,
    /// Grid size N (sequence indices 1..=N, truncation dimension N).
    #[arg(long)]
    pub n: Option<usize>,
    /// Matrix dimension for finite-dim and projnorm.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Left-leg Schatten exponent (a number >= 1 or "inf").
    #[arg(long)]
    pub p: Option<SchattenExponent>,
    /// Right-leg Schatten exponent.
    #[arg(long)]
    pub q: Option<SchattenExponent>,
    /// Tail window for limit detection.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Verdict tolerance on the discrepancy of the two limits.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of seeded trials for suites, or of sampled forms for projnorm.
    #[arg(long)]
    pub trials: Option<usize>,
}

impl RunArgs {
    pub fn resolve(&self) -> RunConfig {
        let mut c = RunConfig::defaults(self.scenario);
        if let Some(n) = self.n {
            c.n = n;
            if self.scenario == ScenarioKind::Schur {
                c.window = LimitRule::schur_default(n).window;
            }
        }
        c.dim = self.dim.unwrap_or(c.dim);
        c.p = self.p.unwrap_or(c.p);
        c.q = self.q.or(self.p).unwrap_or(c.q);
        c.window = self.window.unwrap_or(c.window);
        c.eps = self.eps.unwrap_or(c.eps);
        c.tol = self.tol.unwrap_or(c.tol);
        c.seed = self.seed;
        c.format = self.format;
        c.out = self.out.clone();
        c.trials = self.trials.unwrap_or(c.trials);
        c
    }
}

/// Thread count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}
