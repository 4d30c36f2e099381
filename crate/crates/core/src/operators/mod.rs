//! Matrix-free fusion operators `D`.
//!
//! Every operator exposes `Dx`, `Dᵗy` and `DᵗDx`. The structured kinds never
//! materialize `D`; [`FusionOperator::materialize_dense`] exists for
//! oracle tests on small instances.

mod clustering;
mod condnum;
mod sparse;
mod triangle;
mod tv;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};
use crate::parallel::{self, Parallelism};

pub use clustering::ClusteringOperator;
pub use condnum::CondnumOperator;
pub use sparse::SparseOperator;
pub use triangle::{
    incidence_apply, incidence_apply_transpose, pair_count, pair_index, pair_nodes,
    TriangleOperator,
};
pub use tv::TvOperator;

/// Largest `rows * cols` accepted by [`FusionOperator::materialize_dense`].
pub const DENSE_GUARD: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Identity,
    Dense,
    Sparse,
    Stacked,
    Triangle,
    Clustering,
    Tv,
    Condnum,
}

pub trait FusionOperator: Send + Sync + fmt::Debug {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn kind(&self) -> OperatorKind;

    /// `out = D x`. Lengths are the caller's responsibility.
    fn apply_to(&self, x: &[f64], out: &mut [f64], par: Parallelism);

    /// `out = Dᵗ y`. Lengths are the caller's responsibility.
    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64], par: Parallelism);

    /// `out = DᵗD x`; structured operators override this with their closed forms.
    fn apply_gram_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        let mut tmp = vec![0.0; self.rows()];
        self.apply_to(x, &mut tmp, par);
        self.apply_transpose_to(&tmp, out, par);
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("apply", self.cols(), x.len())?;
        let mut out = vec![0.0; self.rows()];
        self.apply_to(x, &mut out, Parallelism::default());
        Ok(out)
    }

    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("apply_transpose", self.rows(), y.len())?;
        let mut out = vec![0.0; self.cols()];
        self.apply_transpose_to(y, &mut out, Parallelism::default());
        Ok(out)
    }

    fn apply_gram(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("apply_gram", self.cols(), x.len())?;
        let mut out = vec![0.0; self.cols()];
        self.apply_gram_to(x, &mut out, Parallelism::default());
        Ok(out)
    }

    /// Dense copy of `D`, built column by column from basis vectors.
    fn materialize_dense(&self) -> Result<DMatrix<f64>> {
        let (rows, cols) = (self.rows(), self.cols());
        if rows.saturating_mul(cols) > DENSE_GUARD {
            return Err(Error::SizeGuard {
                rows,
                cols,
                limit: DENSE_GUARD,
            });
        }
        let mut dense = DMatrix::zeros(rows, cols);
        let mut e = vec![0.0; cols];
        let mut col = vec![0.0; rows];
        for j in 0..cols {
            e[j] = 1.0;
            self.apply_to(&e, &mut col, Parallelism::Sequential);
            dense.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        Ok(dense)
    }
}

#[derive(Clone, Debug)]
pub struct IdentityOperator {
    n: usize,
}

impl IdentityOperator {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl FusionOperator for IdentityOperator {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Identity
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64], _par: Parallelism) {
        out.copy_from_slice(x);
    }
    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64], _par: Parallelism) {
        out.copy_from_slice(y);
    }
    fn apply_gram_to(&self, x: &[f64], out: &mut [f64], _par: Parallelism) {
        out.copy_from_slice(x);
    }
}

/// Explicit dense matrix; used for small generic problems and tests.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl FusionOperator for DenseOperator {
    fn rows(&self) -> usize {
        self.matrix.nrows()
    }
    fn cols(&self) -> usize {
        self.matrix.ncols()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Dense
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        let a = &self.matrix;
        parallel::fill_indexed(out, par, |i| {
            (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum()
        });
    }
    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64], par: Parallelism) {
        let a = &self.matrix;
        parallel::fill_indexed(out, par, |j| a.column(j).iter().zip(y).map(|(u, v)| u * v).sum());
    }
}

/// Vertical stack `[D_1; D_2; ...]` of operators sharing a column count.
#[derive(Clone, Debug)]
pub struct StackedOperator {
    blocks: Vec<Arc<dyn FusionOperator>>,
    offsets: Vec<usize>,
    cols: usize,
}

impl StackedOperator {
    pub fn new(blocks: Vec<Arc<dyn FusionOperator>>) -> Result<Self> {
        let cols = blocks
            .first()
            .map(|b| b.cols())
            .ok_or_else(|| Error::contract("stacked operator needs at least one block"))?;
        let mut offsets = vec![0];
        for b in &blocks {
            check_len("stacked operator columns", cols, b.cols())?;
            offsets.push(offsets.last().unwrap() + b.rows());
        }
        Ok(Self {
            blocks,
            offsets,
            cols,
        })
    }

    pub fn blocks(&self) -> &[Arc<dyn FusionOperator>] {
        &self.blocks
    }

    /// Row offsets of each block (length `blocks + 1`).
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}

impl FusionOperator for StackedOperator {
    fn rows(&self) -> usize {
        *self.offsets.last().unwrap()
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Stacked
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        for (b, w) in self.blocks.iter().zip(self.offsets.windows(2)) {
            b.apply_to(x, &mut out[w[0]..w[1]], par);
        }
    }
    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64], par: Parallelism) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut tmp = vec![0.0; self.cols];
        for (b, w) in self.blocks.iter().zip(self.offsets.windows(2)) {
            b.apply_transpose_to(&y[w[0]..w[1]], &mut tmp, par);
            crate::linalg::axpy(1.0, &tmp, out);
        }
    }
    fn apply_gram_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut tmp = vec![0.0; self.cols];
        for b in &self.blocks {
            b.apply_gram_to(x, &mut tmp, par);
            crate::linalg::axpy(1.0, &tmp, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_materializes_to_eye() {
        let d = IdentityOperator::new(4).materialize_dense().unwrap();
        assert_eq!(d, DMatrix::identity(4, 4));
    }

    #[test]
    fn identity_block_copies_input() {
        let op = StackedOperator::new(vec![
            Arc::new(TriangleOperator::new(3)),
            Arc::new(IdentityOperator::new(3)),
        ])
        .unwrap();
        let x = [0.3, -1.5, 7.0];
        let y = op.apply(&x).unwrap();
        assert_eq!(&y[3..], &x);
    }

    #[test]
    fn zero_transpose_is_zero() {
        let op = TvOperator::new(3, 4);
        let y = vec![0.0; op.rows()];
        assert!(op.apply_transpose(&y).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let op = CondnumOperator::new(3, 2.0).unwrap();
        assert!(matches!(
            op.apply(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, found: 2, .. })
        ));
        assert!(op.apply_transpose(&[1.0; 8]).is_err());
        assert!(op.apply_gram(&[1.0; 4]).is_err());
    }

    #[test]
    fn size_guard_blocks_large_materialization() {
        let op = IdentityOperator::new(1001);
        assert!(matches!(op.materialize_dense(), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn dense_round_trip() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let op = DenseOperator::new(a.clone());
        assert_eq!(op.materialize_dense().unwrap(), a);
        assert_eq!(op.apply_transpose(&[1.0, 1.0]).unwrap(), vec![5.0, 7.0, 9.0]);
    }
}
