use super::{FusionOperator, OperatorKind};
use crate::error::{Error, Result};
use crate::parallel::{self, Parallelism};

/// Compressed sparse operator storing both `D` and `Dᵗ` row-wise so that
/// products and transpose products are gathers.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    forward: Csr,
    backward: Csr,
}

#[derive(Clone, Debug)]
struct Csr {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Csr {
    fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut idx = vec![0; triplets.len()];
        let mut val = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            idx[fill[r]] = c;
            val[fill[r]] = v;
            fill[r] += 1;
        }
        Self {
            ptr: counts,
            idx,
            val,
        }
    }

    #[inline]
    fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        (self.ptr[r]..self.ptr[r + 1])
            .map(|k| self.val[k] * x[self.idx[k]])
            .sum()
    }
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed on application.
    pub fn from_triplets(rows: usize, cols: usize, triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= rows || c >= cols) {
            return Err(Error::contract(format!("triplet ({r}, {c}) outside a {rows}x{cols} operator")));
        }
        let forward = Csr::from_triplets(rows, &triplets);
        let flipped: Vec<_> = triplets.iter().map(|&(r, c, v)| (c, r, v)).collect();
        let backward = Csr::from_triplets(cols, &flipped);
        Ok(Self {
            rows,
            cols,
            forward,
            backward,
        })
    }

    pub fn nnz(&self) -> usize {
        self.forward.val.len()
    }
}

impl FusionOperator for SparseOperator {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Sparse
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        parallel::fill_indexed(out, par, |r| self.forward.row_dot(r, x));
    }
    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64], par: Parallelism) {
        parallel::fill_indexed(out, par, |c| self.backward.row_dot(c, y));
    }
}
