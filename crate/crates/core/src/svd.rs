//! One-sided (Hestenes) Jacobi singular value decomposition for complex
//! matrices.
//!
//! Columns of a working copy of `A` are orthogonalized pairwise by unitary
//! plane rotations accumulated into `V`. At convergence the column norms are
//! the singular values and the normalized columns form `U`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};

const MAX_SWEEPS: usize = 80;
const ORTHO_TOL: f64 = 1e-15;

/// Singular values in non-increasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum(Vec<f64>);

impl SingularSpectrum {
    /// Sorts the supplied values into non-increasing order.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(
                "singular values must be finite and nonnegative",
            ));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn largest(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    /// Number of values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.0.iter().take_while(|&&s| s > tol).count()
    }
}

/// Thin SVD `A = U diag(sigma) V*` with `k = min(rows, cols)` columns in `U` and `V`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: SingularSpectrum,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let s = self.sigma.values();
        let us = ComplexMatrix::from_fn(self.u.rows(), s.len(), |r, k| self.u.get(r, k) * s[k]);
        us.matmul(&self.v.adjoint())
            .expect("svd factors have compatible shapes")
    }
}

/// Moore-Penrose pseudo-inverse; singular values at or below
/// `rcond * sigma_max` are treated as zero.
pub fn pinv(a: &ComplexMatrix, rcond: f64) -> Result<ComplexMatrix> {
    let f = svd(a)?;
    let s = f.sigma.values();
    let cutoff = rcond * f.sigma.largest();
    let v_scaled = ComplexMatrix::from_fn(f.v.rows(), s.len(), |r, k| {
        if s[k] > cutoff && s[k] > 0.0 {
            f.v.get(r, k) / s[k]
        } else {
            ZERO
        }
    });
    v_scaled.matmul(&f.u.adjoint())
}

/// Column-major scratch buffer; rotations touch whole columns.
struct Columns {
    rows: usize,
    cols: Vec<Vec<C64>>,
}

impl Columns {
    fn from_matrix(a: &ComplexMatrix) -> Self {
        Self {
            rows: a.rows(),
            cols: (0..a.cols())
                .map(|s| (0..a.rows()).map(|r| a.get(r, s)).collect())
                .collect(),
        }
    }

    fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: (0..n)
                .map(|s| (0..n).map(|r| if r == s { ONE } else { ZERO }).collect())
                .collect(),
        }
    }

    fn norm_sqr(&self, k: usize) -> f64 {
        self.cols[k].iter().map(|z| z.norm_sqr()).sum()
    }

    /// `col_p^H col_q`
    fn dot(&self, p: usize, q: usize) -> C64 {
        self.cols[p]
            .iter()
            .zip(&self.cols[q])
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Applies `[a_p, a_q] <- [c a_p - s w a_q, s a_p + c w a_q]` where `w`
    /// is the unit phase that makes `a_p^H (w a_q)` real.
    fn rotate(&mut self, p: usize, q: usize, c: f64, s: f64, w: C64) {
        let (lo, hi) = self.cols.split_at_mut(q);
        let (cp, cq) = (&mut lo[p], &mut hi[0]);
        for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
            let yq = *y * w;
            let xp = *x;
            *x = xp * c - yq * s;
            *y = xp * s + yq * c;
        }
    }

    fn into_matrix(self, order: &[usize]) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, order.len(), |r, k| self.cols[order[k]][r])
    }
}

/// Computes the thin SVD of `a`.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if a.rows() < a.cols() {
        let t = svd_tall(&a.adjoint())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    svd_tall(a)
}

/// Singular values in decreasing order.
///
/// All-zero rows and columns are dropped first; they do not change the
/// nonzero singular values, and the spectrum is padded back with zeros to
/// length `min(rows, cols)`.
pub fn singular_values(a: &ComplexMatrix) -> Result<SingularSpectrum> {
    let keep_rows: Vec<usize> = (0..a.rows())
        .filter(|&r| (0..a.cols()).any(|s| a.get(r, s) != ZERO))
        .collect();
    let keep_cols: Vec<usize> = (0..a.cols())
        .filter(|&s| (0..a.rows()).any(|r| a.get(r, s) != ZERO))
        .collect();
    let full = a.rows().min(a.cols());
    if keep_rows.len() == a.rows() && keep_cols.len() == a.cols() {
        return Ok(svd(a)?.sigma);
    }
    let mut values = if keep_rows.is_empty() {
        Vec::new()
    } else {
        let core = ComplexMatrix::from_fn(keep_rows.len(), keep_cols.len(), |r, s| {
            a.get(keep_rows[r], keep_cols[s])
        });
        svd(&core)?.sigma.values().to_vec()
    };
    values.resize(full, 0.0);
    SingularSpectrum::new(values)
}

fn svd_tall(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut work = Columns::from_matrix(a);
    let mut v = Columns::identity(n);
    let mut norms: Vec<f64> = (0..n).map(|k| work.norm_sqr(k)).collect();

    let mut converged = n < 2;
    let mut last_off = 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        last_off = 0.0_f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let g = work.dot(p, q);
                let gabs = g.norm();
                let rel = gabs / (alpha * beta).sqrt();
                last_off = last_off.max(rel);
                if rel <= ORTHO_TOL {
                    continue;
                }
                rotated = true;
                // unit phase w with g * w = |g|
                let w = g.conj() / gabs;
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                work.rotate(p, q, c, s, w);
                v.rotate(p, q, c, s, w);
                norms[p] = work.norm_sqr(p);
                norms[q] = work.norm_sqr(q);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence {
            op: "svd",
            sweeps,
            residual: last_off,
        });
    }

    let sigma: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let sorted: Vec<f64> = order.iter().map(|&k| sigma[k]).collect();

    let scale = sorted.first().copied().unwrap_or(0.0);
    let cutoff = scale * f64::EPSILON * (m.max(n) as f64);
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for (&k, &s) in order.iter().zip(&sorted) {
        if s > cutoff && s > 0.0 {
            u_cols.push(work.cols[k].iter().map(|z| z / s).collect());
        } else {
            u_cols.push(vec![ZERO; m]);
        }
    }
    complete_orthonormal(&mut u_cols, &sorted, cutoff, m);

    let u = ComplexMatrix::from_fn(m, n, |r, k| u_cols[k][r]);
    Ok(Svd {
        u,
        sigma: SingularSpectrum(sorted),
        v: v.into_matrix(&order),
    })
}

/// Replaces the columns belonging to negligible singular values with unit
/// vectors orthogonal to every other column (modified Gram-Schmidt over the
/// standard basis).
fn complete_orthonormal(cols: &mut [Vec<C64>], sigma: &[f64], cutoff: f64, m: usize) {
    let mut candidate = 0;
    for k in 0..cols.len() {
        if sigma[k] > cutoff && sigma[k] > 0.0 {
            continue;
        }
        loop {
            assert!(candidate < m, "ran out of basis vectors completing U");
            let mut x = vec![ZERO; m];
            x[candidate] = ONE;
            candidate += 1;
            for _ in 0..2 {
                for (j, col) in cols.iter().enumerate() {
                    if j == k || (j > k && !(sigma[j] > cutoff && sigma[j] > 0.0)) {
                        continue;
                    }
                    let proj: C64 = col.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                    for (xi, ci) in x.iter_mut().zip(col) {
                        *xi -= proj * ci;
                    }
                }
            }
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                cols[k] = x.into_iter().map(|z| z / norm).collect();
                break;
            }
        }
    }
}
