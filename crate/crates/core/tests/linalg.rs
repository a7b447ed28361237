mod common;

use common::{c, random_matrix, random_vector, rng};
use nhkpm::linalg::{eig_nonsymmetric, svd, DenseMatrix, EigOptions, SparseOperator, StateVector};
use nhkpm::model::ModelParams;
use nhkpm::vectorize::{build_transformed_liouvillian, VectorizationBasis};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn identity_matvec_is_identity() {
    let v = random_vector(4, &mut rng(1));
    let out = SparseOperator::<f64>::identity(4).matvec(&v).unwrap();
    assert_eq!(out, v);
}

#[test]
fn sigma_z_action() {
    let z = SparseOperator::from_diagonal(&[c(1., 0.), c(-1., 0.)]);
    let up = z.matvec(&StateVector::basis(2, 0)).unwrap();
    let dn = z.matvec(&StateVector::basis(2, 1)).unwrap();
    assert_eq!(up.amplitudes(), &[c(1., 0.), c(0., 0.)]);
    assert_eq!(dn.amplitudes(), &[c(0., 0.), c(-1., 0.)]);
}

#[test]
fn matvec_dimension_mismatch_rejected() {
    let v = StateVector::<f64>::zeros(3);
    assert!(SparseOperator::<f64>::identity(4).matvec(&v).is_err());
}

#[test]
fn sparse_matches_dense_product() {
    let mut r = rng(2);
    let dense = DenseMatrix::from_fn(8, 8, |_, _| {
        if r.gen_bool(0.4) {
            c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
        } else {
            c(0., 0.)
        }
    });
    let sp = SparseOperator::from_dense(&dense).unwrap();
    let v = random_vector(8, &mut r);
    let a = sp.matvec(&v).unwrap();
    let b: Vec<_> = (0..8).map(|i| (0..8).map(|j| dense[(i, j)] * v.amplitudes()[j]).sum()).collect();
    assert!(a.max_abs_diff(&StateVector::new(b).unwrap()) < 1e-12);
}

#[test]
fn duplicate_triplets_are_summed() {
    let sp = SparseOperator::from_triplets(2, vec![(0, 1, c(1., 0.)), (0, 1, c(2., 0.))]).unwrap();
    assert_eq!(sp.nnz(), 1);
    assert_eq!(sp.get(0, 1), c(3., 0.));
}

#[test]
fn out_of_range_triplet_rejected() {
    assert!(SparseOperator::from_triplets(2, vec![(0, 2, c(1., 0.))]).is_err());
}

proptest! {
    #[test]
    fn matvec_is_linear(seed in any::<u64>(), ar in -2.0..2.0f64, ai in -2.0..2.0f64, br in -2.0..2.0f64, bi in -2.0..2.0f64) {
        let mut r = rng(seed);
        let op = SparseOperator::from_dense(&random_matrix(8, 8, &mut r)).unwrap();
        let (u, v) = (random_vector(8, &mut r), random_vector(8, &mut r));
        let (a, b) = (c(ar, ai), c(br, bi));
        let lhs = op.matvec(&u.scaled(a).axpy(b, &v).unwrap()).unwrap();
        let rhs = op.matvec(&u).unwrap().scaled(a).axpy(b, &op.matvec(&v).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

#[test]
fn eig_of_diagonal() {
    let a = DenseMatrix::from_diagonal(&[c(1., 2.), c(-3., 0.)]);
    let e = eig_nonsymmetric(&a, EigOptions::default()).unwrap();
    for (k, want) in [c(1., 2.), c(-3., 0.)].into_iter().enumerate() {
        let n = e.eigenvalues.iter().position(|z| (z - want).norm() < 1e-12).expect("eigenvalue present");
        let v = e.right_vector(n);
        assert!((v.amplitudes()[k].norm() - 1.0).abs() < 1e-12);
        assert!(v.amplitudes()[1 - k].norm() < 1e-12);
    }
}

#[test]
fn eig_of_off_diagonal_pair() {
    let (a, b) = (c(2., 1.), c(0.5, -0.3));
    let m = DenseMatrix::from_row_major(2, 2, vec![c(0., 0.), a, b, c(0., 0.)]).unwrap();
    let e = eig_nonsymmetric(&m, EigOptions::default()).unwrap();
    let r = (a * b).sqrt();
    assert!(common::same_multiset(&e.eigenvalues, &[r, -r], 1e-12));
}

#[test]
fn steady_state_eigenvalue_present() {
    let p = ModelParams::new(2, 0.75, 0.5, 0.0, 0.0, 0.2).unwrap();
    let l = build_transformed_liouvillian(&p, VectorizationBasis::Permuted).unwrap().to_sparse().unwrap().to_dense();
    let e = eig_nonsymmetric(&l, EigOptions::default()).unwrap();
    let zero = e.eigenvalues.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    assert!(zero < 1e-10, "closest eigenvalue to 0: {zero}");
    // Brute-force superoperator agrees on the spectrum.
    let s = common::superoperator(&p);
    let es = nhkpm::linalg::eigenvalues(&s, EigOptions::default()).unwrap();
    assert!(common::same_multiset(&e.eigenvalues, &es, 1e-8));
}

#[test]
fn eig_biorthogonal_and_reconstructs() {
    for seed in 0..5 {
        let a = random_matrix(16, 16, &mut rng(100 + seed));
        let e = eig_nonsymmetric(&a, EigOptions::default()).unwrap();
        assert!(e.biorthogonality_error() < 1e-8, "seed {seed}: {}", e.biorthogonality_error());
        assert!(e.reconstruction_residual < 1e-8);
        for n in 0..16 {
            assert!((e.right_vector(n).norm() - 1.0).abs() < 1e-10);
            let lr = e.left_vector(n).dot(&e.right_vector(n)).unwrap();
            assert!((lr - c(1., 0.)).norm() < 1e-8);
        }
    }
}

#[test]
fn eig_respects_dense_limit() {
    let a = DenseMatrix::<f64>::identity(8);
    assert!(eig_nonsymmetric(&a, EigOptions { dense_limit: 4 }).is_err());
}

#[test]
fn defective_matrix_flags_warning() {
    let jordan = DenseMatrix::from_row_major(2, 2, vec![c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]).unwrap();
    if let Ok(e) = eig_nonsymmetric(&jordan, EigOptions::default()) {
        assert!(!e.warnings.is_empty() || e.reconstruction_residual > 1e-8);
    }
}

#[test]
fn svd_of_identity() {
    let s = svd(&DenseMatrix::<f64>::identity(3)).unwrap();
    for x in &s.s {
        assert!((x - 1.0).abs() < 1e-14);
    }
}

#[test]
fn svd_of_rank_one() {
    let mut r = rng(3);
    let (u, v) = (random_vector(5, &mut r), random_vector(4, &mut r));
    let m = DenseMatrix::from_fn(5, 4, |i, j| u.amplitudes()[i] * v.amplitudes()[j].conj());
    let s = svd(&m).unwrap();
    assert!((s.s[0] - u.norm() * v.norm()).abs() < 1e-12);
    assert!(s.s[1..].iter().all(|x| *x < 1e-12));
}

#[test]
fn svd_reconstructs_and_sorts() {
    let m = random_matrix(6, 4, &mut rng(4));
    let s = svd(&m).unwrap();
    assert!(s.reconstruct().max_abs_diff(&m) < 1e-10 * m.frobenius_norm());
    assert!(s.s.windows(2).all(|w| w[0] >= w[1]) && s.s.iter().all(|x| *x >= 0.0));
    let wide = random_matrix(3, 7, &mut rng(5));
    assert!(svd(&wide).unwrap().reconstruct().max_abs_diff(&wide) < 1e-10 * wide.frobenius_norm());
}

#[test]
fn svd_rejects_non_finite() {
    let mut m = DenseMatrix::<f64>::identity(2);
    m[(0, 1)] = c(f64::NAN, 0.);
    assert!(svd(&m).is_err());
}

#[test]
fn truncated_svd_is_best_rank_k() {
    let m = random_matrix(7, 5, &mut rng(6));
    let s = svd(&m).unwrap();
    for k in 0..=5 {
        let err = s.reconstruct_rank(k).sub(&m).unwrap().frobenius_norm();
        let tail: f64 = s.s[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((err - tail).abs() < 1e-10, "rank {k}: {err} vs {tail}");
    }
    // Random rank-2 competitors never beat the truncation.
    let best = s.reconstruct_rank(2).sub(&m).unwrap().frobenius_norm();
    let mut r = rng(7);
    for _ in 0..20 {
        let a = random_matrix(7, 2, &mut r);
        let b = random_matrix(2, 5, &mut r);
        let cand = a.matmul(&b).unwrap();
        // Optimal least-squares scale for the candidate.
        let num: num_complex::Complex64 = cand.data().iter().zip(m.data()).map(|(x, y)| x.conj() * y).sum();
        let den: f64 = cand.data().iter().map(|x| x.norm_sqr()).sum();
        let err = cand.scaled(num / den).sub(&m).unwrap().frobenius_norm();
        assert!(err >= best - 1e-12);
    }
}

#[test]
fn truncation_rank_follows_cutoff() {
    let d = [c(4., 0.), c(2., 0.), c(1e-3, 0.), c(1e-6, 0.)];
    let s = svd(&DenseMatrix::from_diagonal(&d)).unwrap();
    let (k, disc) = s.truncation_rank(usize::MAX, 1e-2);
    assert_eq!(k, 2);
    assert!((disc - (1e-6 + 1e-12)).abs() < 1e-15);
    assert_eq!(s.truncation_rank(1, 0.0).0, 1);
    assert_eq!(s.truncation_rank(usize::MAX, 0.0).0, 4);
}
