//! Schatten norms, rank-one operators, coordinate projections and the Schur
//! (entrywise) product.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ComplexVector, ONE, ZERO};
use crate::svd::singular_values;

/// Exponent `p` of a Schatten class, `1 <= p < inf`, or the operator norm.
///
/// Serializes as a number, or as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchattenExponent {
    Finite(f64),
    Infinity,
}

impl SchattenExponent {
    pub const TRACE: Self = SchattenExponent::Finite(1.0);
    pub const HILBERT_SCHMIDT: Self = SchattenExponent::Finite(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(SchattenExponent::Infinity);
        }
        if !(p >= 1.0) {
            return Err(Error::invalid(format!(
                "Schatten exponent must be >= 1, got {p}"
            )));
        }
        Ok(SchattenExponent::Finite(p))
    }

    pub fn value(&self) -> f64 {
        match self {
            SchattenExponent::Finite(p) => *p,
            SchattenExponent::Infinity => f64::INFINITY,
        }
    }

    /// Hoelder conjugate `p' = p / (p - 1)`.
    pub fn dual(&self) -> Self {
        match *self {
            SchattenExponent::Infinity => SchattenExponent::Finite(1.0),
            SchattenExponent::Finite(1.0) => SchattenExponent::Infinity,
            SchattenExponent::Finite(p) => SchattenExponent::Finite(p / (p - 1.0)),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            SchattenExponent::Finite(p) if !(p >= 1.0) || !p.is_finite() => Err(Error::invalid(
                format!("Schatten exponent must be >= 1, got {p}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SchattenExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchattenExponent::Finite(p) => write!(f, "{p}"),
            SchattenExponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for SchattenExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(SchattenExponent::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::invalid(format!("not a Schatten exponent: {s:?}")))?;
                SchattenExponent::new(p)
            }
        }
    }
}

impl Serialize for SchattenExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            SchattenExponent::Finite(p) => s.serialize_f64(p),
            SchattenExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for SchattenExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        let parsed = match Repr::deserialize(d)? {
            Repr::Number(p) => SchattenExponent::new(p),
            Repr::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// `(sum_k sigma_k^p)^(1/p)`, or the largest singular value for `p = inf`.
pub fn schatten_norm(a: &ComplexMatrix, p: SchattenExponent) -> Result<f64> {
    p.validate()?;
    let sigma = singular_values(a)?;
    Ok(spectrum_norm(sigma.values(), p))
}

/// Schatten norm of an already-computed spectrum.
pub fn spectrum_norm(sigma: &[f64], p: SchattenExponent) -> f64 {
    match p {
        SchattenExponent::Infinity => sigma.iter().copied().fold(0.0, f64::max),
        SchattenExponent::Finite(1.0) => sigma.iter().sum(),
        SchattenExponent::Finite(2.0) => sigma.iter().map(|s| s * s).sum::<f64>().sqrt(),
        SchattenExponent::Finite(p) => {
            // scale by the largest value so large p does not overflow
            let top = sigma.iter().copied().fold(0.0, f64::max);
            if top == 0.0 {
                return 0.0;
            }
            top * sigma
                .iter()
                .map(|s| (s / top).powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
    }
}

/// Materializes `theta_{xi,eta}: gamma -> <gamma, eta> xi`, i.e. `M_rs = xi_r conj(eta_s)`.
pub fn rank_one(xi: &ComplexVector, eta: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::from_fn(xi.dim(), eta.dim(), |r, s| xi.get(r) * eta.get(s).conj())
}

/// Orthogonal projection onto the span of the first `j` coordinate vectors.
pub fn coordinate_projection(j: usize, dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::invalid("projection dimension must be positive"));
    }
    if j > dim {
        return Err(Error::invalid(format!(
            "projection rank {j} exceeds dimension {dim}"
        )));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |r, s| {
        if r == s && r < j {
            ONE
        } else {
            ZERO
        }
    }))
}

/// Entrywise product in the standard coordinate basis.
pub fn schur(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.zip_with(b, "schur", |x, y| x * y)
}

/// `max |U_rs|` over the block of rows after the first `m` and columns after
/// the first `n`; zero when that block is empty.
pub fn tail_sup(u: &ComplexMatrix, m: usize, n: usize) -> f64 {
    let mut best = 0.0_f64;
    for r in m..u.rows() {
        for s in n..u.cols() {
            best = best.max(u.get(r, s).norm());
        }
    }
    best
}

/// `tail_sup(U, m, n)^2 * sum_{r>=m, s>=n} |V_rs - W_rs|^2` (zero-based).
///
/// When `V` and `W` agree on every entry outside the tail block this bounds
/// `||V * U - W * U||_2^2` (Schur products).
pub fn schur_tail_bound(
    v: &ComplexMatrix,
    w: &ComplexMatrix,
    u: &ComplexMatrix,
    m: usize,
    n: usize,
) -> Result<f64> {
    let diff = v.sub(w)?;
    if diff.shape() != u.shape() {
        return Err(Error::DimensionMismatch {
            op: "schur_tail_bound",
            left: diff.shape(),
            right: u.shape(),
        });
    }
    let mut tail_mass = 0.0;
    for r in m..diff.rows() {
        for s in n..diff.cols() {
            tail_mass += diff.get(r, s).norm_sqr();
        }
    }
    let sup = tail_sup(u, m, n);
    Ok(sup * sup * tail_mass)
}
