//! Randomized regularity suites.
//!
//! The Schur suite draws unit-ball families `W + P(i)` whose perturbation
//! `P(i)` lives on row `i` only, so it escapes every fixed coordinate block
//! (a weakly null sequence at finite truncation) while keeping its norm.
//! The limit points `W` are drawn with geometrically decaying entries, the
//! finite-truncation stand-in for a Hilbert-Schmidt operator.
//!
//! The finite-dimensional suite uses norm-convergent families
//! `S + rho^i P_i` on small matrices under composition.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{riesz_form, BilinearForm, RieszForm, RieszMap};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::operators::{schur, schur_tail_bound};
use crate::par::{try_map_range, Execution};
use crate::random::{gaussian, random_in_ball, stream};

use super::{
    build_grid, iterated_limits, verdict, BiregularityVerdict, Composition, LimitGrid, Scenario,
    SchurProduct, SequenceFamily, VerdictStatus, DEFAULT_EPS, DEFAULT_WINDOW,
};

/// Decay ratio of the limit points in the Schur suite.
pub const SCHUR_DECAY: f64 = 0.2;

/// Largest window usable on an `n`-point grid, capped at the default.
pub fn window_for(n: usize) -> usize {
    DEFAULT_WINDOW.min(n.saturating_sub(1) / 2).max(1)
}

/// Matrix with entries `g_rs * decay^(r + s)`, `g` standard complex Gaussian,
/// rescaled to Hilbert-Schmidt norm `radius`.
pub fn decaying_matrix(rng: &mut impl Rng, dim: usize, decay: f64, radius: f64) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(dim, dim, |r, s| gaussian(rng) * decay.powi((r + s) as i32));
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return m;
    }
    m.scale(C64::new(radius / norm, 0.0))
}

/// Weakly null perturbation supported on row `i - 1`: a few random columns
/// with total Hilbert-Schmidt norm `radius`.
fn row_perturbation(rng: &mut impl Rng, i: usize, dim: usize, radius: f64) -> ComplexMatrix {
    let row = i - 1;
    let picks: Vec<(usize, C64)> = (0..3)
        .map(|_| (rng.gen_range(0..dim), gaussian(rng)))
        .collect();
    let mut m = ComplexMatrix::from_fn(dim, dim, |r, s| {
        if r != row {
            return ZERO;
        }
        picks.iter().filter(|(c, _)| *c == s).map(|(_, z)| z).sum()
    });
    let norm = m.frobenius_norm();
    if norm > 0.0 {
        m = m.scale(C64::new(radius / norm, 0.0));
    }
    m
}

fn weakly_null_family(
    name: &str,
    seed: u64,
    tag: u64,
    limit: ComplexMatrix,
) -> SequenceFamily<ComplexMatrix> {
    let dim = limit.rows();
    SequenceFamily::new(name, 1.0, move |i| {
        let mut rng = stream(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15), i as u64);
        limit
            .add(&row_perturbation(&mut rng, i, dim, 0.5))
            .expect("same shape")
    })
}

/// One randomized Schur-product trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchurTrial {
    pub seed: u64,
    pub verdict: BiregularityVerdict,
    /// `m(W_a * W~_a, W_b * W~_b)` at the weak limit points.
    pub limit_point_value: C64,
    /// Largest distance of a stabilized iterated limit from the limit-point value.
    pub limit_error: Option<f64>,
}

struct SchurSetup {
    scenario: Scenario<ComplexMatrix, ComplexMatrix>,
    #[cfg_attr(not(test), allow(dead_code))]
    limits: Vec<ComplexMatrix>,
    limit_point_value: C64,
}

fn schur_setup(n: usize, seed: u64) -> Result<SchurSetup> {
    let mut rng = stream(seed, 0);
    let limits: Vec<ComplexMatrix> = (0..4)
        .map(|_| {
            let radius = 0.5 * rng.gen::<f64>().sqrt();
            decaying_matrix(&mut rng, n, SCHUR_DECAY, radius)
        })
        .collect();
    let form = riesz_form(RieszMap::random_entrywise(n, 1.0, &mut rng)?);
    let limit_point_value = form.evaluate(
        &schur(&limits[0], &limits[1])?,
        &schur(&limits[2], &limits[3])?,
    )?;
    let scenario = Scenario {
        id: format!("schur(seed={seed})"),
        form: Arc::new(form),
        left_product: Arc::new(SchurProduct),
        a: weakly_null_family("S_i=W_a+P_a(i)", seed, 1, limits[0].clone()),
        a_tilde: weakly_null_family("S~_j=W~_a+P~_a(j)", seed, 2, limits[1].clone()),
        right_product: Arc::new(SchurProduct),
        b: weakly_null_family("T_i=W_b+P_b(i)", seed, 3, limits[2].clone()),
        b_tilde: weakly_null_family("T~_j=W~_b+P~_b(j)", seed, 4, limits[3].clone()),
    };
    Ok(SchurSetup {
        scenario,
        limits,
        limit_point_value,
    })
}

fn limit_error(grid: &LimitGrid, target: C64) -> Option<f64> {
    let values: Vec<C64> = [grid.i_outer, grid.j_outer]
        .iter()
        .flatten()
        .filter_map(|l| l.value)
        .collect();
    if values.is_empty() {
        return None;
    }
    Some(
        values
            .iter()
            .map(|v| (v - target).norm())
            .fold(0.0, f64::max),
    )
}

/// Tail-window rule for a limit-detection pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRule {
    pub window: usize,
    pub eps: f64,
    pub tol: f64,
}

impl LimitRule {
    /// Default rule for an `n`-point Schur grid.
    pub fn schur_default(n: usize) -> Self {
        Self {
            window: window_for(n),
            eps: DEFAULT_EPS,
            tol: 10.0 * DEFAULT_EPS,
        }
    }
}

fn check_schur_n(n: usize) -> Result<()> {
    if n < 8 {
        return Err(Error::invalid(format!(
            "schur scenario needs N >= 8, got {n}"
        )));
    }
    Ok(())
}

/// Schur-product grid on `n x n` truncations with weakly null families and a
/// random contractive Riesz form.
pub fn schur_scenario(n: usize, seed: u64) -> Result<SchurTrial> {
    schur_scenario_with(n, seed, LimitRule::schur_default(n))
}

pub fn schur_scenario_with(n: usize, seed: u64, rule: LimitRule) -> Result<SchurTrial> {
    let (setup, grid) = schur_run(n, seed, rule)?;
    Ok(SchurTrial {
        seed,
        verdict: verdict(&grid, rule.tol),
        limit_point_value: setup.limit_point_value,
        limit_error: limit_error(&grid, setup.limit_point_value),
    })
}

fn schur_run(n: usize, seed: u64, rule: LimitRule) -> Result<(SchurSetup, LimitGrid)> {
    check_schur_n(n)?;
    let setup = schur_setup(n, seed)?;
    let grid = iterated_limits(&build_grid(&setup.scenario, n)?, rule.window, rule.eps)?;
    Ok((setup, grid))
}

/// Scenario behind one Schur trial, for evaluation under a chosen execution
/// mode.
pub fn schur_trial_scenario(n: usize, seed: u64) -> Result<Scenario<ComplexMatrix, ComplexMatrix>> {
    check_schur_n(n)?;
    Ok(schur_setup(n, seed)?.scenario)
}

/// Grid of one Schur trial, for export.
pub fn schur_grid(n: usize, seed: u64, rule: LimitRule) -> Result<LimitGrid> {
    Ok(schur_run(n, seed, rule)?.1)
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub biregular_evidence: usize,
    pub violation: usize,
    pub inconclusive: usize,
}

impl VerdictCounts {
    fn record(&mut self, status: VerdictStatus) {
        match status {
            VerdictStatus::BiregularEvidence => self.biregular_evidence += 1,
            VerdictStatus::Violation => self.violation += 1,
            VerdictStatus::Inconclusive => self.inconclusive += 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchurSuiteSummary {
    pub n: usize,
    pub counts: VerdictCounts,
    pub trials: Vec<SchurTrial>,
}

/// Runs `trials` Schur trials with seeds `seed, seed + 1, ...`.
pub fn schur_suite(n: usize, trials: usize, seed: u64) -> Result<SchurSuiteSummary> {
    schur_suite_with(n, trials, seed, LimitRule::schur_default(n))
}

pub fn schur_suite_with(
    n: usize,
    trials: usize,
    seed: u64,
    rule: LimitRule,
) -> Result<SchurSuiteSummary> {
    check_schur_n(n)?;
    let results = try_map_range(Execution::default(), trials, |t| {
        schur_scenario_with(n, seed.wrapping_add(t as u64), rule)
    })?;
    let mut counts = VerdictCounts::default();
    for r in &results {
        counts.record(r.verdict.status);
    }
    Ok(SchurSuiteSummary {
        n,
        counts,
        trials: results,
    })
}

/// One index of the weakly null monitor `V^(i) = E_{1,i}` against a fixed `U`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonitorPoint {
    pub i: usize,
    /// `|V^(i) * U|_2`
    pub norm: f64,
    /// `schur_tail_bound(V^(i), 0, U, 0, i - 1)`, a bound on `norm^2`.
    pub tail_bound: f64,
}

/// Tracks `|E_{1,i} * U|_2 -> 0` for `u_count` random decaying `U`, each
/// against the tail bound whose block starts at column `i`.
pub fn weak_null_monitor(n: usize, u_count: usize, seed: u64) -> Result<Vec<Vec<MonitorPoint>>> {
    try_map_range(Execution::default(), u_count, |k| {
        let mut rng = stream(seed, k as u64);
        let decay = rng.gen_range(0.5..0.75);
        let radius = rng.gen_range(0.5..1.0);
        let u = decaying_matrix(&mut rng, n, decay, radius);
        let zero = ComplexMatrix::zeros(n, n);
        (1..=n)
            .map(|i| {
                let v = ComplexMatrix::unit(0, i - 1, n);
                Ok(MonitorPoint {
                    i,
                    norm: schur(&v, &u)?.frobenius_norm(),
                    tail_bound: schur_tail_bound(&v, &zero, &u, 0, i - 1)?,
                })
            })
            .collect()
    })
}

/// Perturbation schedule for the finite-dimensional suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Perturbation {
    /// `x_i = x` for every `i`.
    Constant,
    /// `x_i = x + rho^i P_i` with `rho` drawn per trial from `[lo, hi]`.
    Geometric { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteDimConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub n: usize,
    pub window: usize,
    pub eps: f64,
    pub tol: f64,
    pub perturbation: Perturbation,
}

impl FiniteDimConfig {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        Self {
            dim,
            trials,
            seed,
            n: 64,
            window: DEFAULT_WINDOW,
            eps: DEFAULT_EPS,
            tol: 10.0 * DEFAULT_EPS,
            perturbation: Perturbation::Geometric { lo: 0.1, hi: 0.3 },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteDimTrial {
    pub trial: usize,
    pub verdict: BiregularityVerdict,
    /// `m(S S~, T T~)` at the limit points.
    pub limit_point_value: C64,
    pub limit_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteDimSummary {
    pub config: FiniteDimConfig,
    pub counts: VerdictCounts,
    pub max_limit_error: f64,
    pub trials: Vec<FiniteDimTrial>,
}

fn convergent_family(
    name: &str,
    limit: ComplexMatrix,
    rho: f64,
    seed: u64,
    tag: u64,
) -> SequenceFamily<ComplexMatrix> {
    let dim = limit.rows();
    SequenceFamily::new(name, 1.0, move |i| {
        if rho == 0.0 {
            return limit.clone();
        }
        let mut rng = stream(seed ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03), i as u64);
        let p = random_in_ball(&mut rng, dim, dim, 0.5);
        limit
            .add(&p.scale(C64::new(rho.powi(i as i32), 0.0)))
            .expect("same shape")
    })
}

fn finite_dim_trial(cfg: &FiniteDimConfig, trial: usize) -> Result<FiniteDimTrial> {
    let trial_seed = cfg.seed.wrapping_add(trial as u64);
    let mut rng = stream(trial_seed, 0);
    let rho = match cfg.perturbation {
        Perturbation::Constant => 0.0,
        Perturbation::Geometric { lo, hi } => rng.gen_range(lo..=hi),
    };
    let limits: Vec<ComplexMatrix> = (0..4)
        .map(|_| random_in_ball(&mut rng, cfg.dim, cfg.dim, 0.5))
        .collect();
    let form: RieszForm = riesz_form(RieszMap::random_dense(cfg.dim, 1.0, &mut rng)?);
    let limit_point_value = form.evaluate(
        &limits[0].matmul(&limits[1])?,
        &limits[2].matmul(&limits[3])?,
    )?;
    let scenario = Scenario {
        id: format!("finite-dim(trial={trial})"),
        form: Arc::new(form),
        left_product: Arc::new(Composition),
        a: convergent_family("S_i", limits[0].clone(), rho, trial_seed, 1),
        a_tilde: convergent_family("S~_j", limits[1].clone(), rho, trial_seed, 2),
        right_product: Arc::new(Composition),
        b: convergent_family("T_i", limits[2].clone(), rho, trial_seed, 3),
        b_tilde: convergent_family("T~_j", limits[3].clone(), rho, trial_seed, 4),
    };
    scenario.certify_families(cfg.n)?;
    let grid = iterated_limits(&build_grid(&scenario, cfg.n)?, cfg.window, cfg.eps)?;
    Ok(FiniteDimTrial {
        trial,
        verdict: verdict(&grid, cfg.tol),
        limit_point_value,
        limit_error: limit_error(&grid, limit_point_value),
    })
}

/// Randomized finite-dimensional suite with default grid parameters.
pub fn finite_dim_suite(dim: usize, trials: usize, seed: u64) -> Result<FiniteDimSummary> {
    finite_dim_suite_with(&FiniteDimConfig::new(dim, trials, seed))
}

/// Every trial must produce BIREGULAR_EVIDENCE with both limits within
/// `10 * eps` of the limit-point value; otherwise the first offending trial
/// is returned as [`Error::SuiteViolation`].
pub fn finite_dim_suite_with(cfg: &FiniteDimConfig) -> Result<FiniteDimSummary> {
    if cfg.dim == 0 || cfg.dim > 8 {
        return Err(Error::invalid(format!(
            "finite-dimensional suite needs 1 <= dim <= 8, got {}",
            cfg.dim
        )));
    }
    let trials = try_map_range(Execution::default(), cfg.trials, |t| {
        finite_dim_trial(cfg, t)
    })?;
    let mut counts = VerdictCounts::default();
    let mut max_limit_error = 0.0_f64;
    for t in &trials {
        counts.record(t.verdict.status);
        let err = t.limit_error.unwrap_or(f64::INFINITY);
        max_limit_error = max_limit_error.max(err);
        if t.verdict.status != VerdictStatus::BiregularEvidence || err > 10.0 * cfg.eps {
            return Err(Error::SuiteViolation {
                trial: t.trial,
                detail: format!(
                    "status {} discrepancy {:?} limit error {err:e}; witness {:?}",
                    t.verdict.status, t.verdict.discrepancy, t.verdict.witness
                ),
            });
        }
    }
    Ok(FiniteDimSummary {
        config: *cfg,
        counts,
        max_limit_error,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_for_small_grids() {
        assert_eq!(window_for(8), 3);
        assert_eq!(window_for(17), 8);
        assert_eq!(window_for(48), 8);
        for n in 3..64 {
            assert!(2 * window_for(n) < n);
        }
    }

    #[test]
    fn schur_families_stay_in_unit_ball() {
        let setup = schur_setup(24, 5).unwrap();
        assert!(setup.scenario.certify_families(24).unwrap() <= 1.0);
    }

    #[test]
    fn weakly_null_family_is_weakly_convergent() {
        // fixed coordinates of x_i - W vanish once i passes them
        let setup = schur_setup(16, 9).unwrap();
        let fam = &setup.scenario.a;
        let w = &setup.limits[0];
        for i in 1..=16 {
            let d = fam.get(i).sub(w).unwrap();
            assert!((d.frobenius_norm() - 0.5).abs() < 1e-12);
            for r in 0..16 {
                if r != i - 1 {
                    for s in 0..16 {
                        assert!(d.get(r, s).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn schur_trial_finds_regular_evidence() {
        let t = schur_scenario(32, 3).unwrap();
        assert_eq!(t.verdict.status, VerdictStatus::BiregularEvidence);
        assert!(t.limit_error.unwrap() < 1e-8);
        assert!(schur_scenario(7, 3).is_err());
    }

    #[test]
    fn constant_families_hit_limit_point_exactly() {
        let mut cfg = FiniteDimConfig::new(3, 4, 17);
        cfg.perturbation = Perturbation::Constant;
        cfg.n = 20;
        let s = finite_dim_suite_with(&cfg).unwrap();
        assert_eq!(s.counts.biregular_evidence, 4);
        assert!(s.max_limit_error < 1e-14);
    }

    #[test]
    fn finite_dim_small_run() {
        let s = finite_dim_suite(2, 6, 1).unwrap();
        assert_eq!(s.counts.biregular_evidence, 6);
        assert!(finite_dim_suite(9, 1, 1).is_err());
    }

    #[test]
    fn monitor_norm_bounded_by_tail() {
        let runs = weak_null_monitor(24, 3, 2).unwrap();
        for run in runs {
            for p in run {
                assert!(p.norm * p.norm <= p.tail_bound * (1.0 + 1e-12) + 1e-300);
            }
        }
    }
}
