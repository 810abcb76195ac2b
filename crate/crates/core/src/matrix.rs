//! Dense complex matrices and vectors.
//!
//! Storage is row-major. Every operation returns a fresh value; nothing is
//! mutated through the public interface after construction, so values can be
//! shared freely between worker threads.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

fn all_finite(values: &[C64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("vector dimension must be positive"));
        }
        if !all_finite(&entries) {
            return Err(Error::invalid("vector entries must be finite"));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![ZERO; dim],
        }
    }

    /// Standard basis vector with a one at `index` (zero-based).
    pub fn basis(index: usize, dim: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = ONE;
        v
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> C64) -> Self {
        Self {
            entries: (0..dim).map(f).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> C64 {
        self.entries[i]
    }

    /// `<self, other>`, linear in `self` and conjugate linear in `other`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                op: "inner",
                left: (self.dim(), 1),
                right: (other.dim(), 1),
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * alpha).collect(),
        }
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, checking shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !all_finite(&data) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for s in 0..cols {
                data.push(f(r, s));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |r, s| if r == s { ONE } else { ZERO })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, s| if r == s { values[r] } else { ZERO })
    }

    /// Matrix unit `E_{rs}` (zero-based indices) of a square matrix.
    pub fn unit(r: usize, s: usize, dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m.data[r * dim + s] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, s: usize) -> C64 {
        self.data[r * self.cols + s]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, s: usize) -> ComplexVector {
        ComplexVector::from_fn(self.rows, |r| self.get(r, s))
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, alpha: C64) -> Self {
        self.map(|z| z * alpha)
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub(crate) fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(C64, C64) -> C64,
    ) -> Result<Self> {
        self.check_same_shape(other, op)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut data = vec![ZERO; n * m];
        for r in 0..n {
            let out = &mut data[r * m..(r + 1) * m];
            for l in 0..k {
                let a = self.data[r * k + l];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[l * m..(l + 1) * m];
                for (o, &b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: m,
            data,
        })
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch {
                op: "mul_vec",
                left: self.shape(),
                right: (v.dim(), 1),
            });
        }
        Ok(ComplexVector::from_fn(self.rows, |r| {
            self.data[r * self.cols..(r + 1) * self.cols]
                .iter()
                .zip(v.entries())
                .map(|(a, b)| a * b)
                .sum()
        }))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, s| self.get(s, r).conj())
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::invalid(format!(
                "trace of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).map(|r| self.get(r, r)).sum())
    }

    /// Hilbert-Schmidt inner product `<A, B> = Tr(B* A)`.
    ///
    /// Evaluated entrywise as `sum A_rs conj(B_rs)`, which equals the trace
    /// form without materializing `B* A`.
    pub fn hs_inner(&self, other: &Self) -> Result<C64> {
        self.check_same_shape(other, "hs_inner")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.data)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|s| {
                    let z = self.get(r, s);
                    format!("{:.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, rng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_is_left_unit() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(-3.0, 0.5)],
            vec![c(0.0, 1.0), c(4.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(ComplexMatrix::identity(2).matmul(&m).unwrap(), m);
    }

    #[test]
    fn unit_calculus() {
        let e12 = ComplexMatrix::unit(0, 1, 2);
        let e21 = ComplexMatrix::unit(1, 0, 2);
        assert_eq!(e12.matmul(&e21).unwrap(), ComplexMatrix::unit(0, 0, 2));
        assert_eq!(e12.adjoint(), e21);
        assert_eq!(e12.trace().unwrap(), ZERO);
        assert_eq!(e12.hs_inner(&e21).unwrap(), ZERO);
        let e11 = ComplexMatrix::unit(0, 0, 2);
        assert_eq!(e11.hs_inner(&e11).unwrap(), ONE);
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = rng(11);
        let a = random_matrix(&mut rng, 3, 3);
        let b = random_matrix(&mut rng, 3, 3);
        let p = a.matmul(&b).unwrap();
        for r in 0..3 {
            for s in 0..3 {
                let mut acc = ZERO;
                for k in 0..3 {
                    acc += a.get(r, k) * b.get(k, s);
                }
                assert!((p.get(r, s) - acc).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        let err = a.matmul(&a).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { op: "matmul", .. }));
    }

    #[test]
    fn adjoint_of_diag_and_involution() {
        let d = ComplexMatrix::diag(&[ONE, c(0.0, 1.0)]);
        assert_eq!(d.adjoint(), ComplexMatrix::diag(&[ONE, c(0.0, -1.0)]));
        let mut rng = rng(3);
        let a = random_matrix(&mut rng, 3, 5);
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn trace_cases() {
        assert_eq!(ComplexMatrix::identity(3).trace().unwrap(), c(3.0, 0.0));
        assert!(ComplexMatrix::zeros(2, 3).trace().is_err());
        let mut rng = rng(5);
        let a = random_matrix(&mut rng, 6, 6);
        let b = random_matrix(&mut rng, 6, 6);
        let ab = a.matmul(&b).unwrap().trace().unwrap();
        let ba = b.matmul(&a).unwrap().trace().unwrap();
        let scale = 1.0 + a.frobenius_norm() * b.frobenius_norm();
        assert!((ab - ba).norm() <= 1e-12 * scale);
    }

    #[test]
    fn hs_inner_matches_trace_form_and_entry_sum() {
        let mut rng = rng(8);
        let a = random_matrix(&mut rng, 4, 3);
        let b = random_matrix(&mut rng, 4, 3);
        let via_trace = b.adjoint().matmul(&a).unwrap().trace().unwrap();
        assert!((a.hs_inner(&b).unwrap() - via_trace).norm() < 1e-13);
        let sq: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let self_inner = a.hs_inner(&a).unwrap();
        assert!((self_inner.re - sq).abs() < 1e-13 && self_inner.im.abs() < 1e-15);
        assert!(a.hs_inner(&ComplexMatrix::zeros(3, 4)).is_err());
    }

    #[test]
    fn constructor_rejects_non_finite() {
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::new(1, 2, vec![ONE]).is_err());
        assert!(ComplexVector::new(vec![c(0.0, f64::INFINITY)]).is_err());
    }
}
