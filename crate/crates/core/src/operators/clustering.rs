use nalgebra::DMatrix;

use super::{pair_count, FusionOperator, OperatorKind};
use crate::error::{check_len, Error, Result};
use crate::parallel::{self, Parallelism};

/// Weighted pairwise differences of centroids.
///
/// Acts on `vec(U)` for a `d × m` centroid matrix and returns, for every
/// retained pair `(i, j)` with `i > j` in trivec order, the block
/// `w_ij (u_i - u_j)`. Pairs with zero weight are dropped.
#[derive(Clone, Debug)]
pub struct ClusteringOperator {
    d: usize,
    m: usize,
    pairs: Vec<(usize, usize, f64)>,
    // per node: (pair index, signed weight)
    incident: Vec<Vec<(usize, f64)>>,
}

impl ClusteringOperator {
    /// `pairs` lists `(i, j, w)` with `i > j`; zero weights are discarded.
    pub fn new(d: usize, m: usize, pairs: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut kept = Vec::new();
        for (i, j, w) in pairs {
            if i <= j || i >= m {
                return Err(Error::contract(format!("pair ({i}, {j}) is not a lower-triangle pair of {m} nodes")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::contract(format!("weight w[{i},{j}] = {w} must be finite and nonnegative")));
            }
            if w > 0.0 {
                kept.push((i, j, w));
            }
        }
        let mut incident = vec![Vec::new(); m];
        for (l, &(i, j, w)) in kept.iter().enumerate() {
            incident[i].push((l, w));
            incident[j].push((l, -w));
        }
        Ok(Self {
            d,
            m,
            pairs: kept,
            incident,
        })
    }

    /// Reads the strict lower triangle of a symmetric weight matrix in trivec order.
    pub fn from_weight_matrix(d: usize, weights: &DMatrix<f64>) -> Result<Self> {
        let m = weights.nrows();
        check_len("clustering weight matrix columns", m, weights.ncols())?;
        let mut pairs = Vec::with_capacity(pair_count(m));
        for j in 0..m {
            for i in j + 1..m {
                pairs.push((i, j, weights[(i, j)]));
            }
        }
        Self::new(d, m, pairs)
    }

    pub fn features(&self) -> usize {
        self.d
    }

    pub fn samples(&self) -> usize {
        self.m
    }

    /// Retained `(i, j, w_ij)` in column order.
    pub fn pairs(&self) -> &[(usize, usize, f64)] {
        &self.pairs
    }

    /// True when the retained pairs connect all samples.
    pub fn is_connected(&self) -> bool {
        if self.m <= 1 {
            return true;
        }
        let mut seen = vec![false; self.m];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(l, _) in &self.incident[v] {
                let (i, j, _) = self.pairs[l];
                let u = if i == v { j } else { i };
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl FusionOperator for ClusteringOperator {
    fn rows(&self) -> usize {
        self.d * self.pairs.len()
    }
    fn cols(&self) -> usize {
        self.d * self.m
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Clustering
    }

    fn apply_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        let d = self.d;
        parallel::for_each_chunk(out, d, par, |l, block| {
            let (i, j, w) = self.pairs[l];
            let (ui, uj) = (&x[i * d..(i + 1) * d], &x[j * d..(j + 1) * d]);
            for r in 0..d {
                block[r] = w * (ui[r] - uj[r]);
            }
        });
    }

    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64], par: Parallelism) {
        let d = self.d;
        parallel::for_each_chunk(out, d, par, |v, col| {
            col.iter_mut().for_each(|c| *c = 0.0);
            for &(l, sw) in &self.incident[v] {
                let block = &y[l * d..(l + 1) * d];
                for r in 0..d {
                    col[r] += sw * block[r];
                }
            }
        });
    }
}
