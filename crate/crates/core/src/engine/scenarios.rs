//! Closed-form counterexample scenarios.
//!
//! * `hs-hs`: Hilbert-Schmidt legs with `S_i = E_{i1}`, `S~_j = E_{1j}`,
//!   `T_i = E_{i1}`, `T~_j = E_{1j}` and the triangular Riesz form; the grid
//!   is the indicator of `j <= i`.
//! * `bk-k`: superoperators `T_i(A) = theta_{S_i A e_1, e_1}` with
//!   `S_i = theta_{e_1, e_i}`, `T~_j(A) = theta_{R_j A e_1, e_1}` with `R_j`
//!   the projection onto the first `j` coordinates, matrices
//!   `A_i = theta_{e_i, e_1}`, `A~_j = theta_{e_1, e_1}` and the point form
//!   `m(T, A) = <T(A), E_11>`; the grid is the indicator of `i <= j`.
//! * `b0k-k`: the same sequences viewed as finite-rank (compact)
//!   superoperators.
//! * `bk-sp`: the `bk-k` sequences with the matrix leg measured in a
//!   Schatten `p` norm, `1 <= p <= 2`.
//!
//! Every grid entry is exact at each finite `N`; the truncation dimension is
//! `N` so no index leaves the space.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{
    point_form, riesz_form, superop_from_vector_action, triangular_phi, Superoperator,
};
use crate::matrix::{ComplexMatrix, ComplexVector};
use crate::operators::{coordinate_projection, rank_one, schatten_norm, SchattenExponent};
use crate::random::random_matrix;

use super::{
    build_grid, iterated_limits, verdict, BiregularityVerdict, Composition, LimitGrid, Scenario,
    SequenceFamily,
};

fn matrix_unit_family(
    name: &str,
    n: usize,
    unit: fn(usize) -> (usize, usize),
) -> SequenceFamily<ComplexMatrix> {
    SequenceFamily::new(name, 1.0, move |i| {
        let (r, s) = unit(i);
        ComplexMatrix::unit(r, s, n)
    })
}

/// Hilbert-Schmidt counterexample; `G[i][j] = [j <= i]`.
pub fn hs_hs(n: usize) -> Result<Scenario<ComplexMatrix, ComplexMatrix>> {
    if n < 2 {
        return Err(Error::invalid("scenario needs N >= 2"));
    }
    Ok(Scenario {
        id: "hs-hs".into(),
        form: Arc::new(riesz_form(triangular_phi(n)?)),
        left_product: Arc::new(Composition),
        a: matrix_unit_family("S_i=E_{i,1}", n, |i| (i - 1, 0)),
        a_tilde: matrix_unit_family("S~_j=E_{1,j}", n, |j| (0, j - 1)),
        right_product: Arc::new(Composition),
        b: matrix_unit_family("T_i=E_{i,1}", n, |i| (i - 1, 0)),
        b_tilde: matrix_unit_family("T~_j=E_{1,j}", n, |j| (0, j - 1)),
    })
}

/// `S_i = theta_{e_1, e_i}` (1-based `i`).
pub fn shift_to_first(i: usize, n: usize) -> ComplexMatrix {
    rank_one(&ComplexVector::basis(0, n), &ComplexVector::basis(i - 1, n))
}

fn bk_families(
    n: usize,
) -> (
    SequenceFamily<Superoperator>,
    SequenceFamily<Superoperator>,
    SequenceFamily<ComplexMatrix>,
    SequenceFamily<ComplexMatrix>,
) {
    let t = SequenceFamily::new("T_i(A)=theta(S_i A e1, e1)", 1.0, move |i| {
        superop_from_vector_action(shift_to_first(i, n), format!("T_{i}")).expect("square matrix")
    });
    let t_tilde = SequenceFamily::new("T~_j(A)=theta(R_j A e1, e1)", 1.0, move |j| {
        let r_j = coordinate_projection(j, n).expect("j <= n");
        superop_from_vector_action(r_j, format!("T~_{j}")).expect("square matrix")
    });
    let a = matrix_unit_family("A_i=theta(e_i,e_1)", n, |i| (i - 1, 0));
    let a_tilde = matrix_unit_family("A~_j=theta(e_1,e_1)", n, |_| (0, 0));
    (t, t_tilde, a, a_tilde)
}

fn bk_with_id(id: &str, n: usize) -> Result<Scenario<Superoperator, ComplexMatrix>> {
    if n < 2 {
        return Err(Error::invalid("scenario needs N >= 2"));
    }
    let (t, t_tilde, a, a_tilde) = bk_families(n);
    Ok(Scenario {
        id: id.into(),
        form: Arc::new(point_form(ComplexMatrix::unit(0, 0, n))?),
        left_product: Arc::new(Composition),
        a: t,
        a_tilde: t_tilde,
        right_product: Arc::new(Composition),
        b: a,
        b_tilde: a_tilde,
    })
}

/// Superoperator counterexample; `G[i][j] = <S_i R_j e_i, e_1> = [i <= j]`.
pub fn bk_k(n: usize) -> Result<Scenario<Superoperator, ComplexMatrix>> {
    bk_with_id("bk-k", n)
}

/// [`bk_k`] with the superoperators regarded as compact (each has rank one).
pub fn b0k_k(n: usize) -> Result<Scenario<Superoperator, ComplexMatrix>> {
    bk_with_id("b0k-k", n)
}

/// [`bk_k`] with the matrix leg measured in `S_p`, `1 <= p <= 2`.
pub fn bk_sp(n: usize, p: SchattenExponent) -> Result<Scenario<Superoperator, ComplexMatrix>> {
    let pv = p.value();
    if !(1.0..=2.0).contains(&pv) {
        return Err(Error::invalid(format!("bk-sp needs 1 <= p <= 2, got {p}")));
    }
    bk_with_id(&format!("bk-sp(p={p})"), n)
}

/// Norm certificates for a scenario whose matrix legs carry a Schatten `p`
/// norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchattenCertificate {
    pub p: SchattenExponent,
    /// Largest `|x|_p` over the sampled matrix-family elements.
    pub matrix_family_max: f64,
    /// Largest sampled ratio `|T(A)|_p / |A|_p` over the superoperator families.
    pub superop_ratio_max: f64,
    /// Declared form bound in `S_2`; valid on `S_p` since `|.|_2 <= |.|_p`.
    pub form_bound: f64,
}

impl SchattenCertificate {
    pub fn within_unit_ball(&self) -> bool {
        self.matrix_family_max <= 1.0 + 1e-10 && self.superop_ratio_max <= 1.0 + 1e-10
    }
}

/// Certifies the `bk-sp` families in the `S_p` norm over indices `1..=n`,
/// probing each superoperator with every matrix unit `E_{r,1}` and `samples`
/// random matrices.
pub fn certify_schatten_legs(
    scenario: &Scenario<Superoperator, ComplexMatrix>,
    n: usize,
    p: SchattenExponent,
    samples: usize,
    seed: u64,
) -> Result<SchattenCertificate> {
    let matrix_family_max = scenario
        .b
        .certify(n, |x| schatten_norm(x, p))?
        .max(scenario.b_tilde.certify(n, |x| schatten_norm(x, p))?);

    let dim = scenario.b.get(1).rows();
    let mut rng = crate::random::rng(seed);
    let mut probes: Vec<ComplexMatrix> = (0..dim).map(|r| ComplexMatrix::unit(r, 0, dim)).collect();
    probes.extend((0..samples).map(|_| random_matrix(&mut rng, dim, dim)));
    let probe_norms = probes
        .iter()
        .map(|a| schatten_norm(a, p))
        .collect::<Result<Vec<_>>>()?;

    let mut superop_ratio_max = 0.0_f64;
    for family in [&scenario.a, &scenario.a_tilde] {
        for i in 1..=n {
            let t = family.get(i);
            for (a, an) in probes.iter().zip(&probe_norms) {
                let ratio = schatten_norm(&t.apply(a)?, p)? / an;
                superop_ratio_max = superop_ratio_max.max(ratio);
            }
        }
    }
    Ok(SchattenCertificate {
        p,
        matrix_family_max,
        superop_ratio_max,
        form_bound: scenario.form.norm_bound(),
    })
}

/// Builds the grid, fills both limit estimates and issues the verdict.
pub fn evaluate<L, R>(
    scenario: &Scenario<L, R>,
    n: usize,
    window: usize,
    eps: f64,
    tol: f64,
) -> Result<(LimitGrid, BiregularityVerdict)>
where
    L: Send + Sync,
    R: Send + Sync,
{
    let grid = iterated_limits(&build_grid(scenario, n)?, window, eps)?;
    let v = verdict(&grid, tol);
    Ok((grid, v))
}
