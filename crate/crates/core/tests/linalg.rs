use approx::assert_relative_eq;
use jemo::linalg::{
    c64, eigh, hs_norm, lambda_max, op_norm, random_matrix, svd, takagi, trace_norm,
    unitarity_residual, CMatrix, Ensemble, Sample, C64,
};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

fn to_na(m: &CMatrix) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.n(), m.n(), |i, j| {
        Complex::new(m[(i, j)].re, m[(i, j)].im)
    })
}

fn na_singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

fn matrix_strategy(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-3.0f64..3.0, 2 * n * n).prop_map(move |v| {
        CMatrix::from_fn(n, |i, j| c64(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]))
    })
}

#[test]
fn svd_reconstructs_ginibre_matrices() {
    for n in [2usize, 3, 4] {
        for seed in 0..1000 {
            let Sample::Single(m) = random_matrix("ginibre", n, seed).unwrap() else {
                unreachable!()
            };
            let d = svd(&m);
            let r = (&d.reconstruct() - &m).frob();
            assert!(r <= 1e-10, "n={n} seed={seed} residual {r:e}");
            assert!(unitarity_residual(&d.u) <= 1e-10);
            assert!(unitarity_residual(&d.v) <= 1e-10);
        }
    }
}

#[test]
fn norms_match_nalgebra() {
    for seed in 0..200 {
        for n in [2usize, 3, 5] {
            let (m, _) = Ensemble::Ginibre.pair(n, seed);
            let s = na_singular_values(&m);
            assert_relative_eq!(op_norm(&m), s[0], max_relative = 1e-12);
            assert_relative_eq!(trace_norm(&m), s.iter().sum::<f64>(), max_relative = 1e-12);
            let hs = s.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert_relative_eq!(hs_norm(&m), hs, max_relative = 1e-12);
        }
    }
}

#[test]
fn hermitian_eigenvalues_match_nalgebra() {
    for seed in 0..200 {
        let (m, _) = Ensemble::Hermitian.pair(3, seed);
        let (vals, vecs) = eigh(&m).unwrap();
        let mut expected: Vec<f64> = to_na(&m).symmetric_eigenvalues().iter().copied().collect();
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (x, y) in vals.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-11, "{vals:?} vs {expected:?}");
        }
        assert_relative_eq!(lambda_max(&m), expected[0], epsilon = 1e-11);
        let back = &(&vecs * &CMatrix::diag_real(&vals)) * &vecs.adjoint();
        assert!((&back - &m).frob() < 1e-11);
    }
}

#[test]
fn takagi_on_complex_symmetric_matrices() {
    for n in [2usize, 3] {
        for seed in 0..1000 {
            let Sample::Single(m) = random_matrix("complex-symmetric", n, seed).unwrap() else {
                unreachable!()
            };
            let t = takagi(&m).unwrap();
            assert!((&t.reconstruct() - &m).frob() <= 1e-10, "n={n} seed={seed}");
            assert!(unitarity_residual(&t.u) <= 1e-10);
            // Takagi values are the singular values
            for (d, s) in t.delta.iter().zip(na_singular_values(&m)) {
                assert!((d - s).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn takagi_rejects_non_symmetric() {
    let m = CMatrix::real(&[&[1.0, 2.0], &[0.0, 1.0]]);
    assert!(takagi(&m).is_err());
}

#[test]
fn takagi_of_rank_one() {
    let v = [c64(0.6, 0.0), c64(0.0, 0.8)];
    let m = CMatrix::from_fn(2, |i, j| v[i] * v[j]);
    let t = takagi(&m).unwrap();
    assert!((t.delta[0] - 1.0).abs() < 1e-14);
    assert!(t.delta[1].abs() < 1e-14);
    assert!((&t.reconstruct() - &m).frob() < 1e-14);
}

#[test]
fn ensembles_are_deterministic_and_distinct() {
    for e in Ensemble::ALL {
        assert_eq!(e.pair(3, 42), e.pair(3, 42));
        assert_ne!(e.pair(3, 42), e.pair(3, 43));
        assert_eq!(e.tag().parse::<Ensemble>().unwrap(), e);
    }
    assert!(random_matrix("wishart", 2, 0).is_err());
}

#[test]
fn pair_ensembles_have_their_structure() {
    for seed in 0..50 {
        let (a, b) = Ensemble::CommutingPair.pair(2, seed);
        assert!((&(&a * &b) - &(&b * &a)).frob() < 1e-10 * (a.frob() * b.frob()).max(1.0));
        let (a, b) = Ensemble::CommutingNormalPair.pair(3, seed);
        assert!((&(&a * &b) - &(&b * &a)).frob() < 1e-10);
        assert!((&(&a * &a.adjoint()) - &(&a.adjoint() * &a)).frob() < 1e-10);
        let (s, _) = Ensemble::ComplexSymmetric.pair(3, seed);
        assert!((&s - &s.transpose()).frob() == 0.0);
        let (d, _) = Ensemble::Diagonal.pair(3, seed);
        assert_eq!(d[(0, 1)], C64::new(0.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn op_norm_is_top_singular_value(m in matrix_strategy(3)) {
        let s = na_singular_values(&m);
        prop_assert!((op_norm(&m) - s[0]).abs() <= 1e-11 * s[0].max(1.0));
    }

    #[test]
    fn two_by_two_op_norm_agrees(m in matrix_strategy(2)) {
        let s = na_singular_values(&m);
        prop_assert!((op_norm(&m) - s[0]).abs() <= 1e-12 * s[0].max(1.0));
    }

    #[test]
    fn norm_inequalities(m in matrix_strategy(3)) {
        let (op, hs, tr) = (op_norm(&m), hs_norm(&m), trace_norm(&m));
        prop_assert!(op <= hs * (1.0 + 1e-12) + 1e-15);
        prop_assert!(hs <= tr * (1.0 + 1e-12) + 1e-15);
        prop_assert!(hs <= 3f64.sqrt() * op * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn svd_values_descend(m in matrix_strategy(4)) {
        let d = svd(&m);
        prop_assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((&d.reconstruct() - &m).frob() <= 1e-10 * m.frob().max(1.0));
    }
}
