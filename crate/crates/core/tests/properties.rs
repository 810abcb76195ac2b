//! Algebraic invariants of the operator toolkit, checked with proptest.

use biregular::forms::{riesz_form, BilinearForm, RieszMap};
use biregular::operators::spectrum_norm;
use biregular::random::rng;
use biregular::{
    pinv, schatten_norm, schur, schur_tail_bound, singular_values, svd, tail_sup, ComplexMatrix,
    SchattenExponent, C64,
};
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(entry(), rows * cols)
        .prop_map(move |data| ComplexMatrix::new(rows, cols, data).unwrap())
}

fn any_matrix(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| matrix(r, c))
}

fn square_pair(max: usize) -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix)> {
    (1..=max).prop_flat_map(|n| (matrix(n, n), matrix(n, n)))
}

fn same_shape_triple(
    max: usize,
) -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| (matrix(r, c), matrix(r, c), matrix(r, c)))
}

fn exponent() -> impl Strategy<Value = SchattenExponent> {
    prop_oneof![
        (1.0..6.0f64).prop_map(SchattenExponent::Finite),
        Just(SchattenExponent::Infinity)
    ]
}

fn close(a: C64, b: C64, scale: f64) -> bool {
    (a - b).norm() <= 1e-10 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_is_cyclic((a, b) in square_pair(8)) {
        let ab = a.matmul(&b).unwrap().trace().unwrap();
        let ba = b.matmul(&a).unwrap().trace().unwrap();
        prop_assert!(close(ab, ba, a.frobenius_norm() * b.frobenius_norm()));
    }

    #[test]
    fn hs_inner_is_conjugate_symmetric((a, b, _) in same_shape_triple(8)) {
        let ab = a.hs_inner(&b).unwrap();
        let ba = b.hs_inner(&a).unwrap();
        prop_assert!(close(ab, ba.conj(), a.frobenius_norm() * b.frobenius_norm()));
        let aa = a.hs_inner(&a).unwrap();
        prop_assert!(aa.im.abs() <= 1e-12 * aa.re.max(1.0));
        prop_assert!((aa.re.sqrt() - a.frobenius_norm()).abs() <= 1e-12 * aa.re.sqrt().max(1.0));
    }

    #[test]
    fn adjoint_has_same_spectrum(a in any_matrix(10)) {
        let s = singular_values(&a).unwrap();
        let t = singular_values(&a.adjoint()).unwrap();
        prop_assert_eq!(s.values().len(), t.values().len());
        for (x, y) in s.values().iter().zip(t.values()) {
            prop_assert!((x - y).abs() <= 1e-10 * s.largest().max(1.0));
        }
    }

    #[test]
    fn svd_factors_are_orthonormal_and_exact(a in any_matrix(10)) {
        let d = svd(&a).unwrap();
        let residual = d.reconstruct().sub(&a).unwrap().max_abs();
        prop_assert!(residual <= 1e-11 * a.frobenius_norm().max(1.0));
        for q in [&d.u, &d.v] {
            let g = q.adjoint().matmul(q).unwrap();
            let off = g.sub(&ComplexMatrix::identity(q.cols())).unwrap().max_abs();
            prop_assert!(off <= 1e-11);
        }
        prop_assert!(d.sigma.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pseudo_inverse_penrose_identities(a in any_matrix(7)) {
        let p = pinv(&a, 1e-12).unwrap();
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        let pap = p.matmul(&a).unwrap().matmul(&p).unwrap();
        let scale = a.frobenius_norm().max(1.0) * p.frobenius_norm().max(1.0);
        prop_assert!(apa.sub(&a).unwrap().max_abs() <= 1e-9 * scale);
        prop_assert!(pap.sub(&p).unwrap().max_abs() <= 1e-9 * scale * p.frobenius_norm().max(1.0));
    }

    #[test]
    fn schatten_norm_is_a_norm((a, b, _) in same_shape_triple(7), p in exponent(), z in entry()) {
        let na = schatten_norm(&a, p).unwrap();
        let nb = schatten_norm(&b, p).unwrap();
        let nsum = schatten_norm(&a.add(&b).unwrap(), p).unwrap();
        prop_assert!(nsum <= na + nb + 1e-10 * (na + nb).max(1.0));
        let scaled = schatten_norm(&a.scale(z), p).unwrap();
        prop_assert!((scaled - z.norm() * na).abs() <= 1e-10 * na.max(1.0));
        // unitary invariance under the adjoint
        prop_assert!((schatten_norm(&a.adjoint(), p).unwrap() - na).abs() <= 1e-10 * na.max(1.0));
    }

    #[test]
    fn holder_inequality_for_hs_pairing((a, b, _) in same_shape_triple(6), p in exponent()) {
        let pairing = a.hs_inner(&b).unwrap().norm();
        let bound = schatten_norm(&a, p).unwrap() * schatten_norm(&b, p.dual()).unwrap();
        prop_assert!(pairing <= bound * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn spectrum_norm_matches_direct_sum(sigma in prop::collection::vec(0.0..5.0f64, 1..12), p in 1.0..6.0f64) {
        let direct = sigma.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p);
        let got = spectrum_norm(&sigma, SchattenExponent::Finite(p));
        prop_assert!((got - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn schur_product_is_commutative_and_associative((a, b, c) in same_shape_triple(8)) {
        prop_assert_eq!(schur(&a, &b).unwrap(), schur(&b, &a).unwrap());
        let left = schur(&schur(&a, &b).unwrap(), &c).unwrap();
        let right = schur(&a, &schur(&b, &c).unwrap()).unwrap();
        prop_assert!(left.sub(&right).unwrap().max_abs() <= 1e-12 * left.max_abs().max(1.0));
    }

    #[test]
    fn schur_product_is_hs_contractive((a, b, _) in same_shape_triple(8)) {
        // |A * B|_2 <= max|A_rs| |B|_2 <= |A|_2 |B|_2
        let n = schur(&a, &b).unwrap().frobenius_norm();
        prop_assert!(n <= a.max_abs() * b.frobenius_norm() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn tail_bound_dominates_perturbed_product(
        (v, w, u) in same_shape_triple(8),
        m in 0usize..8,
        n in 0usize..8,
    ) {
        // W agrees with V outside the tail block [m.., n..]
        let (rows, cols) = v.shape();
        let w = ComplexMatrix::from_fn(rows, cols, |r, s| if r >= m && s >= n { w.get(r, s) } else { v.get(r, s) });
        let diff = schur(&v, &u).unwrap().sub(&schur(&w, &u).unwrap()).unwrap().frobenius_norm();
        let bound = schur_tail_bound(&v, &w, &u, m, n).unwrap();
        prop_assert!(diff * diff <= bound * (1.0 + 1e-12) + 1e-12);
        prop_assert!(tail_sup(&u, m, n) <= u.max_abs());
    }

    #[test]
    fn riesz_forms_are_bilinear_and_bounded(
        seed in any::<u64>(),
        dim in 1usize..5,
        alpha in entry(),
    ) {
        let mut r = rng(seed);
        let form = riesz_form(RieszMap::random_dense(dim, 1.0, &mut r).unwrap());
        let s = biregular::random::random_matrix(&mut r, dim, dim);
        let s2 = biregular::random::random_matrix(&mut r, dim, dim);
        let t = biregular::random::random_matrix(&mut r, dim, dim);
        let m = |x: &ComplexMatrix, y: &ComplexMatrix| form.evaluate(x, y).unwrap();
        let scale = s.frobenius_norm().max(1.0) * t.frobenius_norm().max(1.0) * (1.0 + alpha.norm());
        // linear in the first slot
        let lhs = m(&s.scale(alpha).add(&s2).unwrap(), &t);
        prop_assert!(close(lhs, alpha * m(&s, &t) + m(&s2, &t), scale * 4.0));
        // linear in the second slot
        let lhs = m(&s, &t.scale(alpha).add(&s2).unwrap());
        prop_assert!(close(lhs, alpha * m(&s, &t) + m(&s, &s2), scale * 4.0));
        let bound = form.norm_bound() * s.frobenius_norm() * t.frobenius_norm();
        prop_assert!(m(&s, &t).norm() <= bound * (1.0 + 1e-10) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn large_svd_residual(seed in any::<u64>(), rows in 32usize..=64, cols in 32usize..=64) {
        let a = biregular::random::random_matrix(&mut rng(seed), rows, cols);
        let d = svd(&a).unwrap();
        let residual = d.reconstruct().sub(&a).unwrap().max_abs();
        prop_assert!(residual <= 1e-10 * a.frobenius_norm());
        let s2 = schatten_norm(&a, SchattenExponent::HILBERT_SCHMIDT).unwrap();
        prop_assert!((s2 - a.frobenius_norm()).abs() <= 1e-10 * s2);
    }
}
