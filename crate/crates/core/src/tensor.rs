//! Projective tensor norm estimates.
//!
//! A tensor `u = sum_{a,b} C[a][b] x_a ⊗ y_b` is stored through its
//! coefficient grid `C` against the coordinate bases of the two legs. A leg
//! with exponent `p` carries the Schatten-`p` norm of the diagonal operator
//! with the given coordinates, i.e. the `l_p` norm of the coordinate vector.
//!
//! `|u|_gamma = inf { sum_k |x_k| |y_k| : u = sum_k x_k ⊗ y_k }` is bracketed
//! by an exact-decomposition optimizer from above and by contractive dual
//! forms from below. For two Hilbert legs the trace norm of `C` gives the
//! exact value.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ComplexVector, C64, ZERO};
use crate::operators::{schatten_norm, spectrum_norm, SchattenExponent};
use crate::par::{try_map_range, Execution};
use crate::random::{random_matrix, stream};
use crate::svd::{pinv, svd};

pub const DEFAULT_RESTARTS: usize = 5;
const FEASIBILITY_LIMIT: f64 = 1e-8;
const PINV_RCOND: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorElement {
    coefficients: ComplexMatrix,
    left_norm: SchattenExponent,
    right_norm: SchattenExponent,
}

impl TensorElement {
    pub fn new(
        coefficients: ComplexMatrix,
        left_norm: SchattenExponent,
        right_norm: SchattenExponent,
    ) -> Result<Self> {
        if !coefficients.is_finite() {
            return Err(Error::invalid("tensor coefficients must be finite"));
        }
        SchattenExponent::new(left_norm.value())?;
        SchattenExponent::new(right_norm.value())?;
        Ok(Self {
            coefficients,
            left_norm,
            right_norm,
        })
    }

    /// Both legs Hilbert spaces.
    pub fn hilbert(coefficients: ComplexMatrix) -> Result<Self> {
        Self::new(
            coefficients,
            SchattenExponent::HILBERT_SCHMIDT,
            SchattenExponent::HILBERT_SCHMIDT,
        )
    }

    /// Elementary tensor `x ⊗ y`, `C[a][b] = x_a y_b`.
    pub fn elementary(
        x: &ComplexVector,
        y: &ComplexVector,
        left_norm: SchattenExponent,
        right_norm: SchattenExponent,
    ) -> Result<Self> {
        let c = ComplexMatrix::from_fn(x.dim(), y.dim(), |a, b| x.get(a) * y.get(b));
        Self::new(c, left_norm, right_norm)
    }

    pub fn coefficients(&self) -> &ComplexMatrix {
        &self.coefficients
    }

    pub fn left_norm(&self) -> SchattenExponent {
        self.left_norm
    }

    pub fn right_norm(&self) -> SchattenExponent {
        self.right_norm
    }

    fn is_hilbert(&self) -> bool {
        self.left_norm == SchattenExponent::HILBERT_SCHMIDT
            && self.right_norm == SchattenExponent::HILBERT_SCHMIDT
    }
}

/// Norm of a leg vector: `l_p` norm of its coordinates.
pub fn leg_norm(v: &[C64], p: SchattenExponent) -> f64 {
    let moduli: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    spectrum_norm(&moduli, p)
}

/// Exact projective norm for two Hilbert legs: the trace norm of `C`.
pub fn nuclear_oracle(u: &TensorElement) -> Result<f64> {
    if !u.is_hilbert() {
        return Err(Error::invalid(format!(
            "nuclear oracle needs Hilbert legs, got p={} q={}",
            u.left_norm, u.right_norm
        )));
    }
    schatten_norm(&u.coefficients, SchattenExponent::TRACE)
}

/// One term `x ⊗ y` of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegPair {
    pub x: Vec<C64>,
    pub y: Vec<C64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpperEstimate {
    pub upper: f64,
    /// Best decomposition; `sum_k x_k y_k^T` reproduces `C`.
    pub certificate: Vec<LegPair>,
    pub residual: f64,
    /// Accepted objective values of the winning restart, non-increasing.
    pub objective_history: Vec<f64>,
    pub restart: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowerEstimate {
    pub lower: f64,
    /// Dual matrix `M` with `|sum_ab M_ab x_a y_b| <= |x|_p |y|_q`;
    /// the bound is `|sum_ab C_ab M_ab|`.
    pub certificate: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectiveNormEstimate {
    pub upper: f64,
    pub lower: f64,
    pub certificate_upper: Vec<LegPair>,
    pub certificate_lower: ComplexMatrix,
    pub objective_history: Vec<f64>,
    /// Exact value when both legs are Hilbert spaces.
    pub oracle: Option<f64>,
}

/// Decomposition `C = X Y` with `X` holding the left vectors as columns and
/// `Y` the right vectors as rows.
#[derive(Clone)]
struct Factors {
    x: ComplexMatrix,
    y: ComplexMatrix,
}

impl Factors {
    fn rank(&self) -> usize {
        self.x.cols()
    }

    fn left(&self, k: usize) -> Vec<C64> {
        (0..self.x.rows()).map(|a| self.x.get(a, k)).collect()
    }

    fn right(&self, k: usize) -> Vec<C64> {
        (0..self.y.cols()).map(|b| self.y.get(k, b)).collect()
    }

    fn objective(&self, p: SchattenExponent, q: SchattenExponent) -> f64 {
        (0..self.rank())
            .map(|k| leg_norm(&self.left(k), p) * leg_norm(&self.right(k), q))
            .sum()
    }

    fn residual(&self, c: &ComplexMatrix) -> f64 {
        self.x
            .matmul(&self.y)
            .and_then(|xy| xy.sub(c))
            .map(|d| d.frobenius_norm())
            .unwrap_or(f64::INFINITY)
    }

    /// Rescales each pair so both legs carry the same norm; the objective is
    /// unchanged.
    fn rebalance(&self, p: SchattenExponent, q: SchattenExponent) -> Self {
        let scale: Vec<f64> = (0..self.rank())
            .map(|k| {
                let nx = leg_norm(&self.left(k), p);
                let ny = leg_norm(&self.right(k), q);
                if nx > 0.0 && ny > 0.0 {
                    (ny / nx).sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Self {
            x: ComplexMatrix::from_fn(self.x.rows(), self.rank(), |a, k| {
                self.x.get(a, k) * scale[k]
            }),
            y: ComplexMatrix::from_fn(self.rank(), self.y.cols(), |k, b| {
                self.y.get(k, b) / scale[k]
            }),
        }
    }

    fn pairs(&self) -> Vec<LegPair> {
        (0..self.rank())
            .map(|k| LegPair {
                x: self.left(k),
                y: self.right(k),
            })
            .filter(|pair| pair.x.iter().any(|z| *z != ZERO) && pair.y.iter().any(|z| *z != ZERO))
            .collect()
    }
}

/// Inverse weights of the quadratic majorizer of `w |v|_p` at `v`, entry by
/// entry; zero marks an entry pinned at zero.
fn inverse_weights(v: &[C64], w: f64, p: SchattenExponent) -> Vec<f64> {
    let pv = p.value();
    let norm = leg_norm(v, p);
    if norm == 0.0 || w == 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter()
        .map(|z| {
            let m = z.norm();
            if m == 0.0 {
                return 0.0;
            }
            // |v|_p <= const + (1/2) |v|_p^(1-p) sum_a |v_a|^(p-2) |x_a|^2
            let weight = 0.5 * w * norm.powf(1.0 - pv) * m.powf(pv - 2.0);
            1.0 / weight
        })
        .collect()
}

/// Minimizes `sum_k omega_k |z_k|^2` subject to `B z = d`, with `omega`
/// given through its inverse `inv` (diagonal).
fn weighted_min_norm(b: &ComplexMatrix, d: &ComplexVector, inv: &[f64]) -> Result<ComplexVector> {
    let b_inv = ComplexMatrix::from_fn(b.rows(), b.cols(), |r, k| b.get(r, k) * inv[k]);
    let gram = b_inv.matmul(&b.adjoint())?;
    let lambda = pinv(&gram, PINV_RCOND)?.mul_vec(d)?;
    b_inv.adjoint().mul_vec(&lambda)
}

/// One majorize-minimize pass over the left factor, then the right factor.
fn mm_step(
    f: &Factors,
    c: &ComplexMatrix,
    p: SchattenExponent,
    q: SchattenExponent,
) -> Result<Factors> {
    let r = f.rank();
    // left: each row x_a of X solves x_a Y = c_a
    let right_w: Vec<f64> = (0..r).map(|k| leg_norm(&f.right(k), q)).collect();
    let col_inv: Vec<Vec<f64>> = (0..r)
        .map(|k| inverse_weights(&f.left(k), right_w[k], p))
        .collect();
    let yt = ComplexMatrix::from_fn(f.y.cols(), r, |b, k| f.y.get(k, b));
    let mut x_rows = Vec::with_capacity(c.rows());
    for a in 0..c.rows() {
        let inv: Vec<f64> = col_inv.iter().map(|w| w[a]).collect();
        let rhs = ComplexVector::from_fn(c.cols(), |b| c.get(a, b));
        x_rows.push(weighted_min_norm(&yt, &rhs, &inv)?);
    }
    let x = ComplexMatrix::from_fn(c.rows(), r, |a, k| x_rows[a].get(k));

    // right: each column y_b of Y solves X y_b = c_b
    let left_w: Vec<f64> = (0..r)
        .map(|k| leg_norm(&(0..x.rows()).map(|a| x.get(a, k)).collect::<Vec<_>>(), p))
        .collect();
    let row_inv: Vec<Vec<f64>> = (0..r)
        .map(|k| inverse_weights(&f.right(k), left_w[k], q))
        .collect();
    let mut y_cols = Vec::with_capacity(c.cols());
    for b in 0..c.cols() {
        let inv: Vec<f64> = row_inv.iter().map(|w| w[b]).collect();
        y_cols.push(weighted_min_norm(&x, &c.column(b), &inv)?);
    }
    let y = ComplexMatrix::from_fn(r, c.cols(), |k, b| y_cols[b].get(k));
    Ok(Factors { x, y })
}

/// Random unitary from the polar factor of a Gaussian matrix.
fn random_unitary(rng: &mut impl Rng, n: usize) -> Result<ComplexMatrix> {
    let f = svd(&random_matrix(rng, n, n))?;
    f.u.matmul(&f.v.adjoint())
}

fn svd_factors(c: &ComplexMatrix, rank: usize) -> Result<(Factors, f64)> {
    let f = svd(c)?;
    let s = f.sigma.values();
    let kept = rank.min(s.len());
    let dropped: f64 = s[kept..].iter().map(|x| x * x).sum::<f64>().sqrt();
    let x = ComplexMatrix::from_fn(c.rows(), rank, |a, k| {
        if k < kept {
            f.u.get(a, k) * s[k].sqrt()
        } else {
            ZERO
        }
    });
    let y = ComplexMatrix::from_fn(rank, c.cols(), |k, b| {
        if k < kept {
            f.v.get(b, k).conj() * s[k].sqrt()
        } else {
            ZERO
        }
    });
    Ok((Factors { x, y }, dropped))
}

fn optimize_restart(
    u: &TensorElement,
    start: Factors,
    iters: usize,
) -> Result<(Factors, Vec<f64>)> {
    let c = &u.coefficients;
    let (p, q) = (u.left_norm, u.right_norm);
    let limit = FEASIBILITY_LIMIT * c.frobenius_norm().max(1.0);
    let mut best = start.rebalance(p, q);
    let mut history = vec![best.objective(p, q)];
    for _ in 0..iters {
        let Ok(next) = mm_step(&best, c, p, q) else {
            break;
        };
        let next = next.rebalance(p, q);
        let value = next.objective(p, q);
        let current = *history.last().expect("nonempty");
        if !(value <= current) || next.residual(c) > limit {
            break;
        }
        best = next;
        history.push(value);
        if current - value <= 1e-14 * current {
            break;
        }
    }
    Ok((best, history))
}

/// Upper bound from rank-`rank` exact decompositions, with the default
/// number of restarts.
pub fn projective_upper(
    u: &TensorElement,
    rank: usize,
    iters: usize,
    seed: u64,
) -> Result<UpperEstimate> {
    projective_upper_with(u, rank, iters, DEFAULT_RESTARTS, seed)
}

/// Majorize-minimize descent on `sum_k |x_k|_p |y_k|_q` over exact
/// decompositions `C = X Y`, started from the SVD of `C` (restart 0) and
/// from unitarily mixed SVD factors (later restarts). Leg exponents must lie
/// in `[1, 2]`.
pub fn projective_upper_with(
    u: &TensorElement,
    rank: usize,
    iters: usize,
    restarts: usize,
    seed: u64,
) -> Result<UpperEstimate> {
    for p in [u.left_norm, u.right_norm] {
        if !(1.0..=2.0).contains(&p.value()) {
            return Err(Error::invalid(format!(
                "decomposition optimizer supports leg exponents in [1, 2], got {p}"
            )));
        }
    }
    if rank == 0 {
        return Err(Error::invalid("rank must be positive"));
    }
    let c = &u.coefficients;
    let limit = FEASIBILITY_LIMIT * c.frobenius_norm().max(1.0);
    let (base, dropped) = svd_factors(c, rank)?;
    if dropped > limit {
        return Err(Error::InfeasibleDecomposition {
            residual: dropped,
            limit,
        });
    }

    let runs = try_map_range(Execution::default(), restarts.max(1), |t| {
        let start = if t == 0 {
            base.clone()
        } else {
            let g = random_unitary(&mut stream(seed, t as u64), rank)?;
            Factors {
                x: base.x.matmul(&g)?,
                y: g.adjoint().matmul(&base.y)?,
            }
        };
        optimize_restart(u, start, iters)
    })?;

    let (restart, (best, history)) = runs
        .into_iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let fa = *a.1.last().expect("nonempty");
            let fb = *b.1.last().expect("nonempty");
            fa.total_cmp(&fb)
        })
        .expect("at least one restart");
    let residual = best.residual(c);
    if residual > limit {
        return Err(Error::InfeasibleDecomposition { residual, limit });
    }
    Ok(UpperEstimate {
        upper: *history.last().expect("nonempty"),
        certificate: best.pairs(),
        residual,
        objective_history: history,
        restart,
    })
}

/// `alpha` with `|alpha|_{p'} = 1` maximizing `|sum_a alpha_a z_a|`; the
/// maximum equals `|z|_p`.
pub fn holder_dual(z: &[C64], p: SchattenExponent) -> Vec<C64> {
    let norm = leg_norm(z, p);
    if norm == 0.0 {
        return vec![ZERO; z.len()];
    }
    match p {
        SchattenExponent::Infinity => {
            let (k, _) = z
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .expect("nonempty");
            let mut out = vec![ZERO; z.len()];
            out[k] = z[k].conj() / z[k].norm();
            out
        }
        SchattenExponent::Finite(pv) => z
            .iter()
            .map(|w| {
                let m = w.norm();
                if m == 0.0 {
                    ZERO
                } else {
                    w.conj() * m.powf(pv - 2.0) / norm.powf(pv - 1.0)
                }
            })
            .collect(),
    }
}

/// `|x|_2 <= factor * |x|_p` on `dim` coordinates.
fn l2_over_lp(dim: usize, p: SchattenExponent) -> f64 {
    let inv = 1.0 / p.value();
    (dim as f64).powf(0.5 - inv).max(1.0)
}

/// `|x|_1 <= factor * |x|_p` on `dim` coordinates.
fn l1_over_lp(dim: usize, p: SchattenExponent) -> f64 {
    (dim as f64).powf(1.0 - 1.0 / p.value())
}

/// Certified upper bound on `sup |sum_ab M_ab x_a y_b|` over the unit balls
/// of the two legs: the smallest of a spectral bound, an entrywise bound and
/// `sum_k sigma_k |u_k|_{p'} |v_k|_{q'}` over the SVD of `M` (exact for
/// rank-one `M`).
pub fn certified_form_bound(
    m: &ComplexMatrix,
    p: SchattenExponent,
    q: SchattenExponent,
) -> Result<f64> {
    let (dl, dr) = m.shape();
    let f = svd(m)?;
    let spectral = f.sigma.largest() * l2_over_lp(dl, p) * l2_over_lp(dr, q);
    let entrywise = m.max_abs() * l1_over_lp(dl, p) * l1_over_lp(dr, q);
    let (pd, qd) = (p.dual(), q.dual());
    let decomposed: f64 = f
        .sigma
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0)
        .map(|(k, &s)| {
            let uk: Vec<C64> = (0..dl).map(|a| f.u.get(a, k)).collect();
            let vk: Vec<C64> = (0..dr).map(|b| f.v.get(b, k)).collect();
            s * leg_norm(&uk, pd) * leg_norm(&vk, qd)
        })
        .sum();
    Ok(spectral.min(entrywise).min(decomposed))
}

fn pairing(c: &ComplexMatrix, m: &ComplexMatrix) -> C64 {
    c.as_slice()
        .iter()
        .zip(m.as_slice())
        .map(|(a, b)| a * b)
        .sum()
}

/// Rank-one dual form refined by alternating Hoelder steps; its norm is
/// exactly `|alpha|_{p'} |beta|_{q'} = 1`.
fn rank_one_dual(
    c: &ComplexMatrix,
    p: SchattenExponent,
    q: SchattenExponent,
    start: Vec<C64>,
) -> ComplexMatrix {
    let ct = ComplexMatrix::from_fn(c.cols(), c.rows(), |b, a| c.get(a, b));
    let mut alpha = start;
    let mut beta = vec![ZERO; c.cols()];
    for _ in 0..50 {
        let z = ct
            .mul_vec(&ComplexVector::from_fn(alpha.len(), |a| alpha[a]))
            .expect("shape");
        beta = holder_dual(z.entries(), q);
        let w = c
            .mul_vec(&ComplexVector::from_fn(beta.len(), |b| beta[b]))
            .expect("shape");
        alpha = holder_dual(w.entries(), p);
    }
    ComplexMatrix::from_fn(c.rows(), c.cols(), |a, b| alpha[a] * beta[b])
}

/// Best `|<u, M>|` over contractive dual forms: the SVD-aligned partial
/// isometry, Hoelder-aligned rank-one forms from the top singular vector and
/// from random starts, and rescaled Gaussian forms.
pub fn projective_lower(u: &TensorElement, trials: usize, seed: u64) -> Result<LowerEstimate> {
    let c = &u.coefficients;
    let (p, q) = (u.left_norm, u.right_norm);
    let f = svd(c)?;
    let s = f.sigma.values();
    let rank = f.sigma.rank(f64::EPSILON * f.sigma.largest() * 16.0);

    let mut candidates: Vec<ComplexMatrix> = Vec::new();
    // sum_k conj(u_k) v_k^T pairs with C to sum_k sigma_k
    candidates.push(ComplexMatrix::from_fn(c.rows(), c.cols(), |a, b| {
        (0..rank)
            .map(|k| f.u.get(a, k).conj() * f.v.get(b, k))
            .sum()
    }));
    if !s.is_empty() && s[0] > 0.0 {
        let top: Vec<C64> = (0..c.rows()).map(|a| f.u.get(a, 0).conj()).collect();
        candidates.push(rank_one_dual(c, p, q, top));
    }

    let random = try_map_range(Execution::default(), trials, |t| {
        let mut rng = stream(seed, t as u64);
        let start: Vec<C64> = random_matrix(&mut rng, 1, c.rows()).as_slice().to_vec();
        let dense = random_matrix(&mut rng, c.rows(), c.cols());
        Ok(vec![rank_one_dual(c, p, q, start), dense])
    })?;
    candidates.extend(random.into_iter().flatten());

    let mut best = (0.0_f64, ComplexMatrix::zeros(c.rows(), c.cols()));
    for m in candidates {
        let bound = certified_form_bound(&m, p, q)?;
        if bound == 0.0 {
            continue;
        }
        let m = if bound > 1.0 {
            m.scale(C64::new(1.0 / bound, 0.0))
        } else {
            m
        };
        let value = pairing(c, &m).norm();
        if value > best.0 {
            best = (value, m);
        }
    }
    Ok(LowerEstimate {
        lower: best.0,
        certificate: best.1,
    })
}

/// Both bounds, plus the exact value on Hilbert legs.
pub fn projective_estimate(
    u: &TensorElement,
    rank: usize,
    iters: usize,
    trials: usize,
    seed: u64,
) -> Result<ProjectiveNormEstimate> {
    let up = projective_upper(u, rank, iters, seed)?;
    let lo = projective_lower(u, trials, seed.wrapping_add(0x5EED))?;
    let oracle = if u.is_hilbert() {
        Some(nuclear_oracle(u)?)
    } else {
        None
    };
    if lo.lower > up.upper + 1e-8 {
        return Err(Error::NoConvergence {
            op: "projective_estimate",
            sweeps: iters,
            residual: lo.lower - up.upper,
        });
    }
    Ok(ProjectiveNormEstimate {
        upper: up.upper,
        lower: lo.lower,
        certificate_upper: up.certificate,
        certificate_lower: lo.certificate,
        objective_history: up.objective_history,
        oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_vector, rng};

    const P1: SchattenExponent = SchattenExponent::TRACE;
    const P2: SchattenExponent = SchattenExponent::HILBERT_SCHMIDT;

    fn ortho_pair_tensor() -> TensorElement {
        // x1⊗y1 + x2⊗y2 with orthonormal x's and y's
        let c = ComplexMatrix::from_fn(3, 3, |a, b| {
            if (a, b) == (0, 1) || (a, b) == (2, 0) {
                C64::new(1.0, 0.0)
            } else {
                ZERO
            }
        });
        TensorElement::hilbert(c).unwrap()
    }

    #[test]
    fn oracle_cases() {
        let mut r = rng(51);
        let x = random_vector(&mut r, 4);
        let y = random_vector(&mut r, 5);
        let u = TensorElement::elementary(&x, &y, P2, P2).unwrap();
        assert!(
            (nuclear_oracle(&u).unwrap() - x.norm() * y.norm()).abs() < 1e-12 * x.norm() * y.norm()
        );
        assert!((nuclear_oracle(&ortho_pair_tensor()).unwrap() - 2.0).abs() < 1e-14);
        let lp = TensorElement::new(ComplexMatrix::identity(2), P1, P2).unwrap();
        assert!(nuclear_oracle(&lp).is_err());
    }

    #[test]
    fn leg_norm_is_lp() {
        let v = [C64::new(3.0, 0.0), C64::new(0.0, -4.0)];
        assert!((leg_norm(&v, P1) - 7.0).abs() < 1e-15);
        assert!((leg_norm(&v, P2) - 5.0).abs() < 1e-15);
        assert!((leg_norm(&v, SchattenExponent::Infinity) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn holder_dual_attains_norm() {
        let mut r = rng(52);
        let z = random_vector(&mut r, 6);
        for p in [
            P1,
            SchattenExponent::Finite(1.5),
            P2,
            SchattenExponent::Finite(3.0),
            SchattenExponent::Infinity,
        ] {
            let a = holder_dual(z.entries(), p);
            let value: C64 = a.iter().zip(z.entries()).map(|(x, y)| x * y).sum();
            assert!((value.re - leg_norm(z.entries(), p)).abs() < 1e-12, "p={p}");
            assert!(value.im.abs() < 1e-12);
            assert!((leg_norm(&a, p.dual()) - 1.0).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn rank_one_upper() {
        let mut r = rng(53);
        let x = random_vector(&mut r, 4);
        let y = random_vector(&mut r, 3);
        for (p, q) in [
            (P2, P2),
            (P1, P2),
            (P1, P1),
            (SchattenExponent::Finite(1.5), P2),
        ] {
            let u = TensorElement::elementary(&x, &y, p, q).unwrap();
            let est = projective_upper(&u, 1, 50, 1).unwrap();
            let expected = leg_norm(x.entries(), p) * leg_norm(y.entries(), q);
            assert!(
                (est.upper - expected).abs() < 1e-10 * expected,
                "p={p} q={q}: {} vs {expected}",
                est.upper
            );
        }
    }

    #[test]
    fn upper_rejects_insufficient_rank() {
        let mut r = rng(54);
        let u = TensorElement::hilbert(random_matrix(&mut r, 4, 4)).unwrap();
        assert!(matches!(
            projective_upper(&u, 2, 10, 0),
            Err(Error::InfeasibleDecomposition { .. })
        ));
        let bad = TensorElement::new(
            ComplexMatrix::identity(2),
            SchattenExponent::Finite(3.0),
            P2,
        )
        .unwrap();
        assert!(projective_upper(&bad, 2, 10, 0).is_err());
    }

    #[test]
    fn objective_never_increases() {
        let mut r = rng(55);
        let u = TensorElement::new(
            random_matrix(&mut r, 4, 4),
            P1,
            SchattenExponent::Finite(1.5),
        )
        .unwrap();
        let est = projective_upper(&u, 6, 200, 3).unwrap();
        assert!(est.objective_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(est.residual <= 1e-8 * u.coefficients().frobenius_norm().max(1.0));
    }

    #[test]
    fn mixed_restarts_descend_toward_oracle() {
        let mut r = rng(56);
        let u = TensorElement::hilbert(random_matrix(&mut r, 4, 4)).unwrap();
        let oracle = nuclear_oracle(&u).unwrap();
        let (base, _) = svd_factors(u.coefficients(), 4).unwrap();
        // a non-unitary change of basis keeps X Y = C but unbalances the columns
        let g = random_matrix(&mut r, 4, 4);
        let start = Factors {
            x: base.x.matmul(&g).unwrap(),
            y: pinv(&g, 1e-12).unwrap().matmul(&base.y).unwrap(),
        };
        let (_, history) = optimize_restart(&u, start, 2000).unwrap();
        assert!(history[0] > oracle * 1.001);
        assert!(*history.last().unwrap() < history[0]);
        assert!(*history.last().unwrap() >= oracle - 1e-8);
    }

    #[test]
    fn lower_cases() {
        let zero = TensorElement::hilbert(ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(projective_lower(&zero, 4, 0).unwrap().lower, 0.0);

        let mut r = rng(57);
        let x = random_vector(&mut r, 5);
        let y = random_vector(&mut r, 5);
        let u = TensorElement::elementary(&x, &y, P2, P2).unwrap();
        let lo = projective_lower(&u, 4, 1).unwrap();
        assert!(lo.lower >= x.norm() * y.norm() - 1e-6);

        let u = TensorElement::hilbert(random_matrix(&mut r, 5, 5)).unwrap();
        let lo = projective_lower(&u, 8, 2).unwrap();
        assert!(lo.lower <= nuclear_oracle(&u).unwrap() + 1e-8);
        assert!(certified_form_bound(&lo.certificate, P2, P2).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn p_leg_bounds_bracket_and_dominate_hilbert() {
        let mut r = rng(58);
        let c = random_matrix(&mut r, 4, 4);
        let hilbert = nuclear_oracle(&TensorElement::hilbert(c.clone()).unwrap()).unwrap();
        let u = TensorElement::new(c, P1, P1).unwrap();
        let est = projective_estimate(&u, 8, 200, 16, 4).unwrap();
        assert!(est.lower <= est.upper + 1e-8);
        assert!(est.upper >= hilbert - 1e-8);
        assert!(est.oracle.is_none());
    }

    #[test]
    fn l1_legs_lower_bound_is_max_entry_duality() {
        // for l1 x l1 the projective norm is sum |C_ab|; forms with |M_ab| <= 1 certify it
        let mut r = rng(59);
        let c = random_matrix(&mut r, 3, 3);
        let exact: f64 = c.as_slice().iter().map(|z| z.norm()).sum();
        let u = TensorElement::new(c, P1, P1).unwrap();
        let est = projective_estimate(&u, 9, 500, 16, 5).unwrap();
        assert!(est.lower <= exact + 1e-9);
        assert!(est.upper >= exact - 1e-9);
    }
}
