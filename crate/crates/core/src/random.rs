//! Seeded pseudo-random sampling of matrices and vectors.
//!
//! Every randomized routine derives an independent ChaCha stream from a
//! `(seed, index)` pair so results do not depend on evaluation order or
//! thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{ComplexMatrix, ComplexVector, C64};

pub type StreamRng = ChaCha8Rng;

pub fn rng(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for item `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_vector(rng: &mut impl Rng, dim: usize) -> ComplexVector {
    ComplexVector::from_fn(dim, |_| gaussian(rng))
}

/// Random matrix with Hilbert-Schmidt norm drawn uniformly from `[0, radius]`.
pub fn random_in_ball(rng: &mut impl Rng, rows: usize, cols: usize, radius: f64) -> ComplexMatrix {
    let m = random_matrix(rng, rows, cols);
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return m;
    }
    let target = radius * rng.gen::<f64>();
    m.scale(C64::new(target / norm, 0.0))
}
