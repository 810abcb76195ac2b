use crate::error::{Error, Result};
use crate::par::{try_map_range, Execution};

use super::{LimitGrid, Scenario};

/// Tabulates `m(a_i a~_j, b_i b~_j)` for `1 <= i, j <= n`.
pub fn build_grid<L, R>(scenario: &Scenario<L, R>, n: usize) -> Result<LimitGrid>
where
    L: Send + Sync,
    R: Send + Sync,
{
    build_grid_with(Execution::default(), scenario, n)
}

/// [`build_grid`] with an explicit execution mode. Rows are evaluated
/// independently; the result does not depend on `exec`.
pub fn build_grid_with<L, R>(
    exec: Execution,
    scenario: &Scenario<L, R>,
    n: usize,
) -> Result<LimitGrid>
where
    L: Send + Sync,
    R: Send + Sync,
{
    if n < 2 {
        return Err(Error::invalid(format!(
            "grid size must be at least 2, got {n}"
        )));
    }
    let a: Vec<L> = (1..=n).map(|i| scenario.a.get(i)).collect();
    let a_tilde: Vec<L> = (1..=n).map(|j| scenario.a_tilde.get(j)).collect();
    let b: Vec<R> = (1..=n).map(|i| scenario.b.get(i)).collect();
    let b_tilde: Vec<R> = (1..=n).map(|j| scenario.b_tilde.get(j)).collect();

    let rows = try_map_range(exec, n, |i| {
        (0..n)
            .map(|j| {
                let left = scenario.left_product.product(&a[i], &a_tilde[j])?;
                let right = scenario.right_product.product(&b[i], &b_tilde[j])?;
                scenario.form.evaluate(&left, &right)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    Ok(LimitGrid {
        n,
        scenario_id: scenario.id.clone(),
        entries: rows.into_iter().flatten().collect(),
        witness: scenario.witness(),
        i_outer: None,
        j_outer: None,
    })
}
