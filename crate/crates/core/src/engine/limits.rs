//! Numerical detection of iterated limits on a finite grid.
//!
//! Inner limits are read off the last `window` indices `N - window + 1 ..= N`.
//! Outer limits run over the window ending at `N / 2`, so every inner index
//! exceeds every outer index and the inner limit is taken "first" in the
//! sense of the iterated limit. A window is stabilized when all of its values
//! lie pairwise within `eps`; its limit estimate is their mean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{C64, ZERO};

use super::{BiregularityVerdict, LimitGrid, VerdictStatus};

pub const DEFAULT_WINDOW: usize = 8;
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IteratedLimit {
    pub stabilized: bool,
    /// Estimate, present only when `stabilized`.
    pub value: Option<C64>,
    /// Largest pairwise spread seen over the inner and outer windows.
    pub spread: f64,
}

fn spread(values: &[C64]) -> f64 {
    let mut worst = 0.0_f64;
    for (k, a) in values.iter().enumerate() {
        for b in &values[k + 1..] {
            worst = worst.max((a - b).norm());
        }
    }
    worst
}

fn mean(values: &[C64]) -> C64 {
    values.iter().fold(ZERO, |acc, z| acc + z) / values.len() as f64
}

/// `inner(outer, inner_index)` reads the grid with the outer index first.
fn detect(n: usize, window: usize, eps: f64, read: impl Fn(usize, usize) -> C64) -> IteratedLimit {
    let half = n / 2;
    let outer_idx = half + 1 - window..=half;
    let inner_idx = n + 1 - window..=n;

    let mut worst = 0.0_f64;
    let mut all_stable = true;
    let mut inner_limits = Vec::with_capacity(window);
    for o in outer_idx {
        let line: Vec<C64> = inner_idx.clone().map(|k| read(o, k)).collect();
        let s = spread(&line);
        worst = worst.max(s);
        all_stable &= s < eps;
        inner_limits.push(mean(&line));
    }
    let outer_spread = spread(&inner_limits);
    worst = worst.max(outer_spread);
    let stabilized = all_stable && outer_spread < eps;
    IteratedLimit {
        stabilized,
        value: stabilized.then(|| mean(&inner_limits)),
        spread: worst,
    }
}

/// Fills in both iterated-limit estimates. Requires `1 <= window < N / 2`
/// and `eps > 0`; non-stabilization is reported through the flags.
pub fn iterated_limits(grid: &LimitGrid, window: usize, eps: f64) -> Result<LimitGrid> {
    if window == 0 || 2 * window >= grid.n {
        return Err(Error::invalid(format!(
            "tail window {window} must satisfy 1 <= window < N/2 (N = {})",
            grid.n
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    let mut out = grid.clone();
    out.i_outer = Some(detect(grid.n, window, eps, |i, j| grid.at(i, j)));
    out.j_outer = Some(detect(grid.n, window, eps, |j, i| grid.at(i, j)));
    Ok(out)
}

/// VIOLATION when both limits stabilized and differ by more than `tol`,
/// BIREGULAR_EVIDENCE when they agree within `tol`, INCONCLUSIVE otherwise.
pub fn verdict(grid: &LimitGrid, tol: f64) -> BiregularityVerdict {
    let pair = match (grid.i_outer, grid.j_outer) {
        (
            Some(IteratedLimit { value: Some(x), .. }),
            Some(IteratedLimit { value: Some(y), .. }),
        ) => Some((x, y)),
        _ => None,
    };
    let discrepancy = pair.map(|(x, y)| (x - y).norm());
    let status = match discrepancy {
        Some(d) if d > tol => VerdictStatus::Violation,
        Some(_) => VerdictStatus::BiregularEvidence,
        None => VerdictStatus::Inconclusive,
    };
    BiregularityVerdict {
        status,
        discrepancy,
        tolerance: tol,
        witness: grid.witness.clone(),
    }
}
