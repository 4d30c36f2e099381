mod common;

use std::sync::Arc;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use proxdist::linalg::dot;
use proxdist::operators::*;
use proxdist::{FusionOperator, Parallelism};

fn random_operator(kind: usize, seed: u64) -> Arc<dyn FusionOperator> {
    let mut r = rng(seed);
    match kind {
        0 => Arc::new(TriangleOperator::new(3 + (seed % 6) as usize)),
        1 => {
            let (d, m) = (1 + (seed % 3) as usize, 3 + (seed % 5) as usize);
            let mut pairs = Vec::new();
            for j in 0..m {
                for i in j + 1..m {
                    pairs.push((i, j, gaussian_vec(1, &mut r)[0].abs()));
                }
            }
            Arc::new(ClusteringOperator::new(d, m, pairs).unwrap())
        }
        2 => Arc::new(TvOperator::new(1 + (seed % 7) as usize, 1 + (seed % 5) as usize)),
        3 => Arc::new(CondnumOperator::new(2 + (seed % 6) as usize, 1.0 + (seed % 10) as f64).unwrap()),
        4 => {
            let (rows, cols) = (1 + (seed % 9) as usize, 1 + (seed % 4) as usize);
            let trips = (0..rows * cols)
                .filter(|k| k % 3 != 1)
                .map(|k| (k / cols, k % cols, gaussian_vec(1, &mut r)[0]))
                .collect();
            Arc::new(SparseOperator::from_triplets(rows, cols, trips).unwrap())
        }
        5 => {
            let (rows, cols) = (1 + (seed % 6) as usize, 1 + (seed % 5) as usize);
            Arc::new(DenseOperator::new(DMatrix::from_vec(rows, cols, gaussian_vec(rows * cols, &mut r))))
        }
        _ => {
            let m = 3 + (seed % 4) as usize;
            let n = pair_count(m);
            Arc::new(
                StackedOperator::new(vec![Arc::new(TriangleOperator::new(m)), Arc::new(IdentityOperator::new(n))])
                    .unwrap(),
            )
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn adjoint_identity_holds(kind in 0usize..7, seed in any::<u64>()) {
        let op = random_operator(kind, seed);
        let mut r = rng(seed ^ 0x5a5a);
        let x = gaussian_vec(op.cols(), &mut r);
        let y = gaussian_vec(op.rows(), &mut r);
        let lhs = dot(&op.apply(&x).unwrap(), &y);
        let rhs = dot(&x, &op.apply_transpose(&y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn gram_matches_composition(kind in 0usize..7, seed in any::<u64>()) {
        let op = random_operator(kind, seed);
        let x = gaussian_vec(op.cols(), &mut rng(seed));
        let gram = op.apply_gram(&x).unwrap();
        let composed = op.apply_transpose(&op.apply(&x).unwrap()).unwrap();
        prop_assert!(rel_err(&gram, &composed) <= 1e-12 || composed.iter().all(|v| v.abs() < 1e-300));
    }

    #[test]
    fn sequential_and_rayon_agree(kind in 0usize..7, seed in any::<u64>()) {
        let op = random_operator(kind, seed);
        let x = gaussian_vec(op.cols(), &mut rng(seed));
        let mut a = vec![0.0; op.rows()];
        let mut b = vec![0.0; op.rows()];
        op.apply_to(&x, &mut a, Parallelism::Sequential);
        op.apply_to(&x, &mut b, Parallelism::Rayon);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn triangle_matches_definition() {
    for m in 3..=7 {
        let dense = TriangleOperator::new(m).materialize_dense().unwrap();
        let oracle = dense_triangle(m);
        // Row order may differ; compare as multisets of rows.
        let key = |mat: &DMatrix<f64>| {
            let mut rows: Vec<Vec<i64>> = mat.row_iter().map(|r| r.iter().map(|v| *v as i64).collect()).collect();
            rows.sort();
            rows
        };
        assert_eq!(dense.nrows(), 3 * m * (m - 1) * (m - 2) / 6);
        assert_eq!(key(&dense), key(&oracle));
    }
}

#[test]
fn triangle_column_counts() {
    for m in 3..=9 {
        let dense = TriangleOperator::new(m).materialize_dense().unwrap();
        for col in dense.column_iter() {
            let nz = col.iter().filter(|v| **v != 0.0).count();
            assert_eq!(nz, 3 * (m - 2));
            assert_eq!(col.iter().filter(|v| **v > 0.0).count(), m - 2);
        }
    }
}

#[test]
fn triangle_gram_is_diagonally_dominant_with_known_spectrum() {
    let m = 8;
    let op = TriangleOperator::new(m);
    let gram = {
        let d = op.materialize_dense().unwrap();
        d.transpose() * d
    };
    for i in 0..gram.nrows() {
        let off: f64 = (0..gram.ncols()).filter(|&j| j != i).map(|j| gram[(i, j)].abs()).sum();
        assert!(gram[(i, i)] >= off - 1e-12);
    }
    let eig = gram.symmetric_eigen().eigenvalues;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &e| (a.min(e), b.max(e)));
    assert!((lo - (m - 2) as f64).abs() < 1e-9);
    assert!((hi - (3 * m - 4) as f64).abs() < 1e-9);
}

#[test]
fn incidence_helpers_match_dense() {
    let m = 6;
    let a = dense_incidence(m);
    let v = gaussian_vec(m, &mut rng(3));
    let w = gaussian_vec(pair_count(m), &mut rng(4));
    let av = &a * DMatrix::from_vec(m, 1, v.clone());
    let atw = a.transpose() * DMatrix::from_vec(w.len(), 1, w.clone());
    assert!(rel_err(&incidence_apply(m, &v).unwrap(), av.as_slice()) < 1e-14);
    assert!(rel_err(&incidence_apply_transpose(m, &w).unwrap(), atw.as_slice()) < 1e-14);
}

#[test]
fn pair_indexing_round_trips() {
    for m in 2..10 {
        for e in 0..pair_count(m) {
            let (i, j) = pair_nodes(m, e);
            assert!(i > j);
            assert_eq!(pair_index(m, i, j), e);
            assert_eq!(e, pair_position(m, i, j));
        }
    }
}

#[test]
fn stacked_apply_is_concatenation() {
    let a: Arc<dyn FusionOperator> = Arc::new(TvOperator::new(3, 4));
    let b: Arc<dyn FusionOperator> = Arc::new(IdentityOperator::new(12));
    let s = StackedOperator::new(vec![a.clone(), b.clone()]).unwrap();
    let x = gaussian_vec(12, &mut rng(9));
    let mut expect = a.apply(&x).unwrap();
    expect.extend(b.apply(&x).unwrap());
    assert_eq!(s.apply(&x).unwrap(), expect);
    assert_eq!(s.offsets(), &[0, a.rows(), a.rows() + b.rows()][..]);
}

#[test]
fn stacked_rejects_mismatched_columns() {
    let a: Arc<dyn FusionOperator> = Arc::new(IdentityOperator::new(3));
    let b: Arc<dyn FusionOperator> = Arc::new(IdentityOperator::new(4));
    assert!(StackedOperator::new(vec![a, b]).is_err());
}

#[test]
fn length_mismatch_is_an_error() {
    let op = TvOperator::new(2, 2);
    assert!(op.apply(&[1.0; 3]).is_err());
    assert!(op.apply_transpose(&[1.0; 2]).is_err());
}

#[test]
fn materialize_guard_trips() {
    assert!(IdentityOperator::new(2000).materialize_dense().is_err());
}

#[test]
fn condnum_rejects_small_bound() {
    assert!(CondnumOperator::new(3, 0.5).is_err());
}

#[test]
fn clustering_connectivity() {
    let connected = ClusteringOperator::new(1, 3, vec![(1, 0, 1.0), (2, 1, 1.0)]).unwrap();
    let split = ClusteringOperator::new(1, 3, vec![(1, 0, 1.0), (2, 1, 0.0)]).unwrap();
    assert!(connected.is_connected());
    assert!(!split.is_connected());
    assert_eq!(split.pairs().len(), 1);
    assert!(ClusteringOperator::new(1, 3, vec![(1, 0, -1.0)]).is_err());
}
