//! Bounded bilinear forms on truncated Hilbert-Schmidt spaces.
//!
//! A bounded bilinear form on a pair of Hilbert spaces is represented through
//! a conjugate-linear map `phi` as `m(S, T) = <T, phi(S)>` ([`RieszForm`]).
//! The point-evaluation form `m(T, A) = <T(A), D>` takes a [`Superoperator`]
//! (a linear map on matrices) in its first slot ([`PointForm`]).

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ComplexVector, C64, ONE, ZERO};
use crate::operators::rank_one;
use crate::random::gaussian;
use crate::svd::singular_values;

/// A bounded bilinear form `L x R -> C`.
pub trait BilinearForm<L, R>: Send + Sync {
    fn evaluate(&self, left: &L, right: &R) -> Result<C64>;

    /// Upper bound on `|m(x, y)| / (|x| |y|)` for the norms of the two legs.
    fn norm_bound(&self) -> f64;

    fn id(&self) -> String;
}

#[derive(Clone)]
enum RieszKind {
    /// `phi(A)[target[k]] = weight[k] * conj(A[k])` over row-major positions;
    /// `target` is injective, `None` means the identity placement.
    Entrywise {
        target: Option<Arc<[usize]>>,
        weight: Arc<[C64]>,
    },
    /// `vec(phi(A)) = M vec(conj(A))`.
    Dense(Arc<ComplexMatrix>),
}

/// Conjugate-linear map between matrix spaces of one fixed shape.
#[derive(Clone)]
pub struct RieszMap {
    shape: (usize, usize),
    kind: RieszKind,
    norm_bound: f64,
    label: String,
}

impl fmt::Debug for RieszMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RieszMap")
            .field("label", &self.label)
            .field("shape", &self.shape)
            .field("norm_bound", &self.norm_bound)
            .finish()
    }
}

impl RieszMap {
    /// Masked conjugation `A -> mask ∘ conj(A)`.
    pub fn masked(
        shape: (usize, usize),
        weight: Vec<C64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::entrywise(shape, None, weight, label)
    }

    /// Reindexed, weighted conjugation. `target` must be a permutation of the
    /// row-major positions.
    pub fn entrywise(
        shape: (usize, usize),
        target: Option<Vec<usize>>,
        weight: Vec<C64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let len = shape.0 * shape.1;
        if len == 0 {
            return Err(Error::invalid("empty shape"));
        }
        if weight.len() != len {
            return Err(Error::invalid(format!(
                "expected {len} weights, got {}",
                weight.len()
            )));
        }
        if let Some(t) = &target {
            let mut seen = vec![false; len];
            for &k in t {
                if k >= len || std::mem::replace(&mut seen[k], true) {
                    return Err(Error::invalid("entrywise target is not a permutation"));
                }
            }
            if t.len() != len {
                return Err(Error::invalid("entrywise target is not a permutation"));
            }
        }
        let norm_bound = weight.iter().map(|w| w.norm()).fold(0.0, f64::max);
        Ok(Self {
            shape,
            kind: RieszKind::Entrywise {
                target: target.map(Into::into),
                weight: weight.into(),
            },
            norm_bound,
            label: label.into(),
        })
    }

    /// `A -> conj(A)`.
    pub fn conjugation(shape: (usize, usize)) -> Self {
        Self::masked(shape, vec![ONE; shape.0 * shape.1], "conjugation").expect("nonempty shape")
    }

    /// Dense conjugate-linear map `vec(phi(A)) = M vec(conj(A))`; the bound is
    /// the operator norm of `M`.
    pub fn dense(
        shape: (usize, usize),
        m: ComplexMatrix,
        label: impl Into<String>,
    ) -> Result<Self> {
        let len = shape.0 * shape.1;
        if m.shape() != (len, len) {
            return Err(Error::DimensionMismatch {
                op: "RieszMap::dense",
                left: (len, len),
                right: m.shape(),
            });
        }
        let norm_bound = singular_values(&m)?.largest();
        Ok(Self {
            shape,
            kind: RieszKind::Dense(Arc::new(m)),
            norm_bound,
            label: label.into(),
        })
    }

    /// Dense map with Gaussian coefficients, scaled to operator norm `bound`.
    pub fn random_dense(dim: usize, bound: f64, rng: &mut impl Rng) -> Result<Self> {
        let len = dim * dim;
        let m = ComplexMatrix::from_fn(len, len, |_, _| gaussian(rng));
        let s = singular_values(&m)?.largest();
        Self::dense(
            (dim, dim),
            m.scale(C64::new(bound / s, 0.0)),
            "random-dense",
        )
    }

    /// Random permutation of positions with weights in the closed disc of
    /// radius `bound`.
    pub fn random_entrywise(dim: usize, bound: f64, rng: &mut impl Rng) -> Result<Self> {
        use rand::seq::SliceRandom;
        let len = dim * dim;
        let mut target: Vec<usize> = (0..len).collect();
        target.shuffle(rng);
        let weight = (0..len)
            .map(|_| {
                let r = bound * rng.gen::<f64>().sqrt();
                C64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
            })
            .collect();
        Self::entrywise((dim, dim), Some(target), weight, "random-entrywise")
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.shape() != self.shape {
            return Err(Error::DimensionMismatch {
                op: "RieszMap::apply",
                left: self.shape,
                right: a.shape(),
            });
        }
        let (rows, cols) = self.shape;
        let src = a.as_slice();
        let data = match &self.kind {
            RieszKind::Entrywise {
                target: None,
                weight,
            } => src
                .iter()
                .zip(weight.iter())
                .map(|(z, w)| w * z.conj())
                .collect(),
            RieszKind::Entrywise {
                target: Some(target),
                weight,
            } => {
                let mut out = vec![ZERO; src.len()];
                for (k, z) in src.iter().enumerate() {
                    out[target[k]] = weight[k] * z.conj();
                }
                out
            }
            RieszKind::Dense(m) => {
                let v = ComplexVector::from_fn(src.len(), |k| src[k].conj());
                m.mul_vec(&v)?.entries().to_vec()
            }
        };
        ComplexMatrix::new(rows, cols, data)
    }
}

/// Lower-triangular truncation (diagonal kept) composed with conjugation: the
/// coefficient at `(i, j)` maps to its conjugate when `j <= i` and to zero
/// otherwise.
pub fn triangular_phi(dim: usize) -> Result<RieszMap> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let weight = (0..dim * dim)
        .map(|k| if k % dim <= k / dim { ONE } else { ZERO })
        .collect();
    RieszMap::masked((dim, dim), weight, "triangular")
}

/// `m(S, T) = <T, phi(S)>`.
#[derive(Debug, Clone)]
pub struct RieszForm {
    phi: RieszMap,
}

impl RieszForm {
    pub fn phi(&self) -> &RieszMap {
        &self.phi
    }
}

pub fn riesz_form(phi: RieszMap) -> RieszForm {
    RieszForm { phi }
}

impl BilinearForm<ComplexMatrix, ComplexMatrix> for RieszForm {
    fn evaluate(&self, s: &ComplexMatrix, t: &ComplexMatrix) -> Result<C64> {
        t.hs_inner(&self.phi.apply(s)?)
    }

    fn norm_bound(&self) -> f64 {
        self.phi.norm_bound
    }

    fn id(&self) -> String {
        format!("riesz[{}]", self.phi.label)
    }
}

type ApplyFn = dyn Fn(&ComplexMatrix) -> Result<ComplexMatrix> + Send + Sync;

/// Linear map on `dim x dim` matrices, kept as a closure.
#[derive(Clone)]
pub struct Superoperator {
    dim: usize,
    norm_bound: f64,
    label: String,
    apply: Arc<ApplyFn>,
}

impl fmt::Debug for Superoperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Superoperator")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("norm_bound", &self.norm_bound)
            .finish()
    }
}

impl Superoperator {
    /// Wraps a linear map; `norm_bound` must bound its induced
    /// Hilbert-Schmidt norm.
    pub fn new(
        dim: usize,
        norm_bound: f64,
        label: impl Into<String>,
        apply: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            norm_bound,
            label: label.into(),
            apply: Arc::new(apply),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, 1.0, "id", |a| Ok(a.clone()))
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, 0.0, "0", move |a| {
            Ok(ComplexMatrix::zeros(a.rows(), a.cols()))
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                op: "Superoperator::apply",
                left: (self.dim, self.dim),
                right: a.shape(),
            });
        }
        (self.apply)(a)
    }

    /// Largest ratio `|T(A)|_2 / |A|_2` over `samples` random matrices plus
    /// every matrix unit.
    pub fn sampled_bound(&self, samples: usize, rng: &mut impl Rng) -> Result<f64> {
        let mut best = 0.0_f64;
        for r in 0..self.dim {
            for s in 0..self.dim {
                best = best.max(
                    self.apply(&ComplexMatrix::unit(r, s, self.dim))?
                        .frobenius_norm(),
                );
            }
        }
        for _ in 0..samples {
            let a = crate::random::random_matrix(rng, self.dim, self.dim);
            let ratio = self.apply(&a)?.frobenius_norm() / a.frobenius_norm();
            best = best.max(ratio);
        }
        Ok(best)
    }

    /// Matrix of the map in the matrix-unit basis (row-major vectorization),
    /// size `dim^2 x dim^2`. Intended for small `dim`.
    pub fn materialize(&self) -> Result<ComplexMatrix> {
        let n2 = self.dim * self.dim;
        let mut cols = Vec::with_capacity(n2);
        for k in 0..n2 {
            let image = self.apply(&ComplexMatrix::unit(k / self.dim, k % self.dim, self.dim))?;
            cols.push(image);
        }
        Ok(ComplexMatrix::from_fn(n2, n2, |r, k| cols[k].as_slice()[r]))
    }
}

/// `A -> theta_{S (A e_1), e_1}`: the first column of `A` is pushed through
/// `S` and placed back as the first column of a rank-one matrix.
pub fn superop_from_vector_action(
    s: ComplexMatrix,
    label: impl Into<String>,
) -> Result<Superoperator> {
    if !s.is_square() {
        return Err(Error::invalid("vector action requires a square matrix"));
    }
    let dim = s.rows();
    let bound = singular_values(&s)?.largest();
    let e1 = ComplexVector::basis(0, dim);
    Ok(Superoperator::new(dim, bound, label, move |a| {
        let v = s.mul_vec(&a.column(0))?;
        Ok(rank_one(&v, &e1))
    }))
}

/// `T1 ∘ T2`.
pub fn compose_superops(t1: &Superoperator, t2: &Superoperator) -> Result<Superoperator> {
    if t1.dim != t2.dim {
        return Err(Error::DimensionMismatch {
            op: "compose_superops",
            left: (t1.dim, t1.dim),
            right: (t2.dim, t2.dim),
        });
    }
    let (f, g) = (t1.apply.clone(), t2.apply.clone());
    Ok(Superoperator {
        dim: t1.dim,
        norm_bound: t1.norm_bound * t2.norm_bound,
        label: format!("{}∘{}", t1.label, t2.label),
        apply: Arc::new(move |a| f(&g(a)?)),
    })
}

/// `m(T, A) = <T(A), D>`.
#[derive(Debug, Clone)]
pub struct PointForm {
    d: ComplexMatrix,
    d_norm: f64,
}

pub fn point_form(d: ComplexMatrix) -> Result<PointForm> {
    if !d.is_square() {
        return Err(Error::invalid("point form needs a square matrix D"));
    }
    let d_norm = d.frobenius_norm();
    Ok(PointForm { d, d_norm })
}

impl PointForm {
    pub fn target(&self) -> &ComplexMatrix {
        &self.d
    }
}

impl BilinearForm<Superoperator, ComplexMatrix> for PointForm {
    fn evaluate(&self, t: &Superoperator, a: &ComplexMatrix) -> Result<C64> {
        if a.shape() != self.d.shape() {
            return Err(Error::DimensionMismatch {
                op: "PointForm::evaluate",
                left: self.d.shape(),
                right: a.shape(),
            });
        }
        t.apply(a)?.hs_inner(&self.d)
    }

    fn norm_bound(&self) -> f64 {
        self.d_norm
    }

    fn id(&self) -> String {
        "point".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{coordinate_projection, schatten_norm, SchattenExponent};
    use crate::random::{random_matrix, rng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn triangular_phi_rule() {
        let phi = triangular_phi(3).unwrap();
        assert_eq!(
            phi.apply(&ComplexMatrix::unit(0, 1, 3)).unwrap(),
            ComplexMatrix::zeros(3, 3)
        );
        assert_eq!(
            phi.apply(&ComplexMatrix::unit(1, 0, 3)).unwrap(),
            ComplexMatrix::unit(1, 0, 3)
        );
        let ie11 = ComplexMatrix::unit(0, 0, 3).scale(c(0.0, 1.0));
        assert_eq!(
            phi.apply(&ie11).unwrap(),
            ComplexMatrix::unit(0, 0, 3).scale(c(0.0, -1.0))
        );
        assert_eq!(phi.norm_bound(), 1.0);
    }

    #[test]
    fn triangular_phi_is_contractive_and_conjugate_linear() {
        let phi = triangular_phi(6).unwrap();
        let mut rng = rng(31);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 6, 6);
            let b = random_matrix(&mut rng, 6, 6);
            let alpha = crate::random::gaussian(&mut rng);
            assert!(phi.apply(&a).unwrap().frobenius_norm() <= a.frobenius_norm() + 1e-15);
            let lhs = phi.apply(&a.scale(alpha).add(&b).unwrap()).unwrap();
            let rhs = phi
                .apply(&a)
                .unwrap()
                .scale(alpha.conj())
                .add(&phi.apply(&b).unwrap())
                .unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn random_maps_respect_bounds() {
        let mut rng = rng(32);
        let maps = [
            RieszMap::random_dense(3, 1.0, &mut rng).unwrap(),
            RieszMap::random_entrywise(4, 0.7, &mut rng).unwrap(),
        ];
        for phi in &maps {
            let n = phi.shape().0;
            for _ in 0..20 {
                let a = random_matrix(&mut rng, n, n);
                let out = phi.apply(&a).unwrap().frobenius_norm();
                assert!(out <= phi.norm_bound() * a.frobenius_norm() * (1.0 + 1e-12));
            }
        }
        assert!((maps[0].norm_bound() - 1.0).abs() < 1e-10);
        assert!(maps[1].norm_bound() <= 0.7);
    }

    #[test]
    fn entrywise_rejects_non_permutation() {
        let w = vec![ONE; 4];
        assert!(RieszMap::entrywise((2, 2), Some(vec![0, 0, 1, 2]), w.clone(), "bad").is_err());
        assert!(RieszMap::entrywise((2, 2), Some(vec![0, 1, 2, 7]), w, "bad").is_err());
    }

    #[test]
    fn riesz_form_cases() {
        let e11 = ComplexMatrix::unit(0, 0, 3);
        let m = riesz_form(RieszMap::conjugation((3, 3)));
        assert_eq!(m.evaluate(&e11, &e11).unwrap(), ONE);

        let tri = riesz_form(triangular_phi(3).unwrap());
        let mut rng = rng(33);
        let t = random_matrix(&mut rng, 3, 3);
        assert_eq!(
            tri.evaluate(&ComplexMatrix::unit(0, 1, 3), &t).unwrap(),
            ZERO
        );
        assert!(tri.evaluate(&e11, &ComplexMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn riesz_form_is_bilinear_and_bounded() {
        let mut rng = rng(34);
        let form = riesz_form(RieszMap::random_dense(3, 1.0, &mut rng).unwrap());
        for _ in 0..20 {
            let s = random_matrix(&mut rng, 3, 3);
            let s2 = random_matrix(&mut rng, 3, 3);
            let t = random_matrix(&mut rng, 3, 3);
            let alpha = crate::random::gaussian(&mut rng);
            let m = form.evaluate(&s, &t).unwrap();
            // linear, not conjugate linear, in the first slot
            let scaled = form.evaluate(&s.scale(alpha), &t).unwrap();
            assert!((scaled - alpha * m).norm() < 1e-12 * (1.0 + m.norm() * alpha.norm()));
            let sum = form.evaluate(&s.add(&s2).unwrap(), &t).unwrap();
            let parts = m + form.evaluate(&s2, &t).unwrap();
            assert!((sum - parts).norm() < 1e-12 * (1.0 + sum.norm()));
            let scaled_t = form.evaluate(&s, &t.scale(alpha)).unwrap();
            assert!((scaled_t - alpha * m).norm() < 1e-12 * (1.0 + m.norm() * alpha.norm()));
            let bound = form.norm_bound() * s.frobenius_norm() * t.frobenius_norm();
            assert!(m.norm() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn riesz_form_bounded_on_schatten_p_legs() {
        let mut rng = rng(35);
        let form = riesz_form(RieszMap::random_dense(3, 1.0, &mut rng).unwrap());
        for p in [1.0, 1.25, 1.5, 2.0] {
            let p = SchattenExponent::Finite(p);
            for _ in 0..10 {
                let s = random_matrix(&mut rng, 3, 3);
                let t = random_matrix(&mut rng, 3, 3);
                let bound = form.norm_bound()
                    * schatten_norm(&s, p).unwrap()
                    * schatten_norm(&t, p).unwrap();
                assert!(form.evaluate(&s, &t).unwrap().norm() <= bound * (1.0 + 1e-10));
            }
        }
    }

    #[test]
    fn point_form_cases() {
        let e11 = ComplexMatrix::unit(0, 0, 4);
        let m = point_form(e11.clone()).unwrap();
        assert_eq!(m.evaluate(&Superoperator::identity(4), &e11).unwrap(), ONE);
        let mut rng = rng(36);
        let a = random_matrix(&mut rng, 4, 4);
        assert_eq!(m.evaluate(&Superoperator::zero(4), &a).unwrap(), ZERO);
        assert!(point_form(ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn vector_action_superoperator() {
        let dim = 5;
        let e11 = ComplexMatrix::unit(0, 0, dim);
        let id = superop_from_vector_action(ComplexMatrix::identity(dim), "I").unwrap();
        assert_eq!(id.apply(&e11).unwrap(), e11);

        for i in 0..dim {
            let e1 = ComplexVector::basis(0, dim);
            let ei = ComplexVector::basis(i, dim);
            let s_i = rank_one(&e1, &ei);
            let t_i = superop_from_vector_action(s_i, "T").unwrap();
            assert_eq!(t_i.apply(&rank_one(&ei, &e1)).unwrap(), e11);
        }

        let mut rng = rng(37);
        let s = random_matrix(&mut rng, dim, dim);
        let t = superop_from_vector_action(s, "S").unwrap();
        let a = random_matrix(&mut rng, dim, dim);
        let b = random_matrix(&mut rng, dim, dim);
        let alpha = crate::random::gaussian(&mut rng);
        let lhs = t.apply(&a.scale(alpha).add(&b).unwrap()).unwrap();
        let rhs = t
            .apply(&a)
            .unwrap()
            .scale(alpha)
            .add(&t.apply(&b).unwrap())
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
        assert!(t.sampled_bound(50, &mut rng).unwrap() <= t.norm_bound() * (1.0 + 1e-12));
    }

    #[test]
    fn composition_rules() {
        let dim = 4;
        let mut rng = rng(38);
        let t1 = superop_from_vector_action(random_matrix(&mut rng, dim, dim), "a").unwrap();
        let t2 = superop_from_vector_action(random_matrix(&mut rng, dim, dim), "b").unwrap();
        let t3 = superop_from_vector_action(random_matrix(&mut rng, dim, dim), "c").unwrap();
        let a = random_matrix(&mut rng, dim, dim);

        let with_id = compose_superops(&t1, &Superoperator::identity(dim)).unwrap();
        assert_eq!(with_id.apply(&a).unwrap(), t1.apply(&a).unwrap());

        let left = compose_superops(&compose_superops(&t1, &t2).unwrap(), &t3).unwrap();
        let right = compose_superops(&t1, &compose_superops(&t2, &t3).unwrap()).unwrap();
        let d = left
            .apply(&a)
            .unwrap()
            .sub(&right.apply(&a).unwrap())
            .unwrap();
        assert!(d.max_abs() < 1e-10 * (1.0 + left.apply(&a).unwrap().max_abs()));

        // T_i ∘ T~_j on E_11 is theta_{S_i R_j e_1, e_1}
        let e1 = ComplexVector::basis(0, dim);
        for i in 0..dim {
            for j in 1..=dim {
                let s_i = rank_one(&e1, &ComplexVector::basis(i, dim));
                let r_j = coordinate_projection(j, dim).unwrap();
                let t_i = superop_from_vector_action(s_i.clone(), "T").unwrap();
                let tt_j = superop_from_vector_action(r_j.clone(), "R").unwrap();
                let got = compose_superops(&t_i, &tt_j)
                    .unwrap()
                    .apply(&ComplexMatrix::unit(0, 0, dim))
                    .unwrap();
                let v = s_i.matmul(&r_j).unwrap().mul_vec(&e1).unwrap();
                assert_eq!(got, rank_one(&v, &e1));
            }
        }
    }

    #[test]
    fn materialized_bound_matches_declared() {
        let dim = 3;
        let mut rng = rng(39);
        let s = random_matrix(&mut rng, dim, dim);
        let t = superop_from_vector_action(s, "S").unwrap();
        let exact = singular_values(&t.materialize().unwrap())
            .unwrap()
            .largest();
        assert!((exact - t.norm_bound()).abs() < 1e-10);
    }
}
