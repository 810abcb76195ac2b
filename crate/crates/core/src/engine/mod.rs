//! Iterated double-limit grids and biregularity verdicts.
//!
//! For a bounded bilinear form `m` and bounded sequence families
//! `(a_i), (a~_j)` on the left leg and `(b_i), (b~_j)` on the right leg the
//! engine tabulates `G[i][j] = m(a_i a~_j, b_i b~_j)` for `1 <= i, j <= N`,
//! then estimates `lim_i lim_j G` and `lim_j lim_i G`. A form is biregular
//! when those two limits agree for every admissible choice of families.
//!
//! Sequence indices start at 1, matrix indices at 0.

mod grid;
mod limits;
pub mod scenarios;
pub mod suites;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forms::{compose_superops, BilinearForm, Superoperator};
use crate::matrix::ComplexMatrix;
use crate::operators::schur;

pub use grid::{build_grid, build_grid_with};
pub use limits::{iterated_limits, verdict, IteratedLimit, DEFAULT_EPS, DEFAULT_WINDOW};

/// Algebra multiplication used to form `a_i a~_j`.
pub trait Product<E>: Send + Sync {
    fn product(&self, a: &E, b: &E) -> Result<E>;
    fn name(&self) -> &'static str;
}

/// Operator composition (`matmul` for matrices, `∘` for superoperators).
#[derive(Debug, Clone, Copy, Default)]
pub struct Composition;

impl Product<ComplexMatrix> for Composition {
    fn product(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        a.matmul(b)
    }

    fn name(&self) -> &'static str {
        "composition"
    }
}

impl Product<Superoperator> for Composition {
    fn product(&self, a: &Superoperator, b: &Superoperator) -> Result<Superoperator> {
        compose_superops(a, b)
    }

    fn name(&self) -> &'static str {
        "composition"
    }
}

/// Entrywise product in the coordinate basis.
#[derive(Debug, Clone, Copy, Default)]
pub struct SchurProduct;

impl Product<ComplexMatrix> for SchurProduct {
    fn product(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        schur(a, b)
    }

    fn name(&self) -> &'static str {
        "schur"
    }
}

type Generator<E> = dyn Fn(usize) -> E + Send + Sync;

/// Indexed family `i -> x_i` (`i >= 1`) with a norm bound every element obeys.
#[derive(Clone)]
pub struct SequenceFamily<E> {
    name: String,
    bound: f64,
    generator: Arc<Generator<E>>,
}

impl<E> fmt::Debug for SequenceFamily<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceFamily")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .finish()
    }
}

impl<E> SequenceFamily<E> {
    pub fn new(
        name: impl Into<String>,
        bound: f64,
        generator: impl Fn(usize) -> E + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            bound,
            generator: Arc::new(generator),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Element `x_i`; `i` starts at 1.
    pub fn get(&self, i: usize) -> E {
        debug_assert!(i >= 1, "sequence indices start at 1");
        (self.generator)(i)
    }

    /// Largest `norm(x_i)` over `1 <= i <= n`; fails if any element exceeds
    /// the declared bound by more than `1e-10`.
    pub fn certify(&self, n: usize, norm: impl Fn(&E) -> Result<f64>) -> Result<f64> {
        let mut worst = 0.0_f64;
        for i in 1..=n {
            let value = norm(&self.get(i))?;
            if value > self.bound + 1e-10 {
                return Err(crate::Error::invalid(format!(
                    "family {} element {i} has norm {value} above bound {}",
                    self.name, self.bound
                )));
            }
            worst = worst.max(value);
        }
        Ok(worst)
    }
}

/// Norm used when certifying family elements: Hilbert-Schmidt norm for
/// matrices, declared induced bound for superoperators.
pub trait LegNorm {
    fn leg_norm(&self) -> f64;
}

impl LegNorm for ComplexMatrix {
    fn leg_norm(&self) -> f64 {
        self.frobenius_norm()
    }
}

impl LegNorm for Superoperator {
    fn leg_norm(&self) -> f64 {
        self.norm_bound()
    }
}

/// Everything needed to tabulate one double-limit grid.
#[derive(Clone)]
pub struct Scenario<L, R> {
    pub id: String,
    pub form: Arc<dyn BilinearForm<L, R>>,
    pub left_product: Arc<dyn Product<L>>,
    pub a: SequenceFamily<L>,
    pub a_tilde: SequenceFamily<L>,
    pub right_product: Arc<dyn Product<R>>,
    pub b: SequenceFamily<R>,
    pub b_tilde: SequenceFamily<R>,
}

impl<L, R> Scenario<L, R> {
    pub fn witness(&self) -> Witness {
        Witness {
            form: self.form.id(),
            left_product: self.left_product.name().to_string(),
            right_product: self.right_product.name().to_string(),
            a: self.a.name.clone(),
            a_tilde: self.a_tilde.name.clone(),
            b: self.b.name.clone(),
            b_tilde: self.b_tilde.name.clone(),
        }
    }
}

impl<L: LegNorm, R: LegNorm> Scenario<L, R> {
    /// Certifies all four families over `1..=n`, returning the largest norm seen.
    pub fn certify_families(&self, n: usize) -> Result<f64> {
        let mut worst = 0.0_f64;
        worst = worst.max(self.a.certify(n, |x| Ok(x.leg_norm()))?);
        worst = worst.max(self.a_tilde.certify(n, |x| Ok(x.leg_norm()))?);
        worst = worst.max(self.b.certify(n, |x| Ok(x.leg_norm()))?);
        worst = worst.max(self.b_tilde.certify(n, |x| Ok(x.leg_norm()))?);
        Ok(worst)
    }
}

/// Identifies the form and sequence families behind a grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub form: String,
    pub left_product: String,
    pub right_product: String,
    pub a: String,
    pub a_tilde: String,
    pub b: String,
    pub b_tilde: String,
}

/// `N x N` table of `m(a_i a~_j, b_i b~_j)`, row `i`, column `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitGrid {
    pub n: usize,
    pub scenario_id: String,
    /// Row-major; `entries[(i - 1) * n + (j - 1)]`.
    pub entries: Vec<crate::C64>,
    pub witness: Witness,
    /// `lim_i lim_j`: inner limit along each row, outer over rows.
    #[serde(rename = "row_then_col")]
    pub i_outer: Option<IteratedLimit>,
    /// `lim_j lim_i`: inner limit down each column, outer over columns.
    #[serde(rename = "col_then_row")]
    pub j_outer: Option<IteratedLimit>,
}

impl LimitGrid {
    /// Entry at sequence indices `(i, j)`, both starting at 1.
    pub fn at(&self, i: usize, j: usize) -> crate::C64 {
        self.entries[(i - 1) * self.n + (j - 1)]
    }

    /// Largest deviation from a 0/1 indicator pattern.
    pub fn indicator_deviation(&self, indicator: impl Fn(usize, usize) -> bool) -> f64 {
        let mut worst = 0.0_f64;
        for i in 1..=self.n {
            for j in 1..=self.n {
                let target = if indicator(i, j) { 1.0 } else { 0.0 };
                worst = worst.max((self.at(i, j) - crate::C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictStatus {
    BiregularEvidence,
    Violation,
    Inconclusive,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::BiregularEvidence => "BIREGULAR_EVIDENCE",
            VerdictStatus::Violation => "VIOLATION",
            VerdictStatus::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiregularityVerdict {
    pub status: VerdictStatus,
    /// `|lim_i lim_j - lim_j lim_i|`, present when both limits stabilized.
    pub discrepancy: Option<f64>,
    pub tolerance: f64,
    pub witness: Witness,
}
