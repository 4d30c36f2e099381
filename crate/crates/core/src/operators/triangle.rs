//! Triangle-inequality matrix `T` over the complete graph on `m` nodes and
//! the complete-graph incidence matrix `M`.
//!
//! Pairs `(i, j)` with `i > j` are laid out column-major over the strict
//! lower triangle: ascending `j`, then ascending `i`. Triples `i > k > j`
//! are enumerated by ascending `j`, then `k`, then `i`; each contributes
//! three consecutive rows
//!
//! ```text
//! x_ij - x_ik - x_kj
//! x_ik - x_ij - x_kj
//! x_kj - x_ij - x_ik
//! ```
//!
//! so `Tx ≤ 0` encodes every triangle inequality.

use super::{FusionOperator, OperatorKind};
use crate::error::{check_len, Result};
use crate::linalg::binom;
use crate::parallel::{self, Parallelism};

/// Number of unordered pairs on `m` nodes.
pub fn pair_count(m: usize) -> usize {
    binom(m, 2)
}

/// Position of the pair `(i, j)`, `i > j`, in trivec order.
#[inline]
pub fn pair_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i > j && i < m);
    j * m - j * (j + 1) / 2 + (i - j - 1)
}

/// Inverse of [`pair_index`]: the nodes `(i, j)`, `i > j`, of a pair.
pub fn pair_nodes(m: usize, mut idx: usize) -> (usize, usize) {
    let mut j = 0;
    loop {
        let len = m - j - 1;
        if idx < len {
            return (j + 1 + idx, j);
        }
        idx -= len;
        j += 1;
    }
}

#[inline]
fn triple_index(m: usize, i: usize, k: usize, j: usize) -> usize {
    debug_assert!(i > k && k > j);
    let offset = binom(m, 3) - binom(m - j, 3);
    let n = m - 1 - j;
    let (kk, ii) = (k - j - 1, i - j - 1);
    offset + kk * n - kk * (kk + 1) / 2 + (ii - kk - 1)
}

#[derive(Clone, Debug)]
pub struct TriangleOperator {
    m: usize,
    nodes: Vec<(u32, u32)>,
    bounds: Vec<usize>,
}

impl TriangleOperator {
    pub fn new(m: usize) -> Self {
        let nodes = (0..pair_count(m))
            .map(|e| {
                let (i, j) = pair_nodes(m, e);
                (i as u32, j as u32)
            })
            .collect();
        let bounds = (0..=m.saturating_sub(2))
            .map(|j| 3 * (binom(m, 3) - binom(m - j.min(m), 3)))
            .collect();
        Self { m, nodes, bounds }
    }

    pub fn nodes(&self) -> usize {
        self.m
    }
}

impl FusionOperator for TriangleOperator {
    fn rows(&self) -> usize {
        3 * binom(self.m, 3)
    }
    fn cols(&self) -> usize {
        pair_count(self.m)
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Triangle
    }

    fn apply_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        let m = self.m;
        if self.rows() == 0 {
            return;
        }
        parallel::for_each_segment(out, &self.bounds, par, |j, seg| {
            let mut r = 0;
            for k in j + 1..m {
                let xkj = x[pair_index(m, k, j)];
                for i in k + 1..m {
                    let xij = x[pair_index(m, i, j)];
                    let xik = x[pair_index(m, i, k)];
                    seg[r] = xij - xik - xkj;
                    seg[r + 1] = xik - xij - xkj;
                    seg[r + 2] = xkj - xij - xik;
                    r += 3;
                }
            }
        });
    }

    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64], par: Parallelism) {
        let m = self.m;
        parallel::fill_indexed(out, par, |e| {
            let (a, b) = self.nodes[e];
            let (a, b) = (a as usize, b as usize);
            let mut acc = 0.0;
            for t in 0..m {
                if t == a || t == b {
                    continue;
                }
                // sort {a, b, t} descending into (i, k, j); locate the edge's role
                let (i, k, j, role) = if t > a {
                    (t, a, b, 2)
                } else if t > b {
                    (a, t, b, 0)
                } else {
                    (a, b, t, 1)
                };
                let base = 3 * triple_index(m, i, k, j);
                let total = y[base] + y[base + 1] + y[base + 2];
                acc += 2.0 * y[base + role] - total;
            }
            acc
        });
    }

    fn apply_gram_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        // TᵗT = (3m - 4) I - M Mᵗ
        let m = self.m;
        let node_sums = incidence_transpose_raw(m, x);
        let scale = 3.0 * m as f64 - 4.0;
        parallel::fill_indexed(out, par, |e| {
            let (i, j) = self.nodes[e];
            scale * x[e] - (node_sums[i as usize] + node_sums[j as usize])
        });
    }
}

fn incidence_raw(m: usize, v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(pair_count(m));
    for j in 0..m {
        for i in j + 1..m {
            out.push(v[i] + v[j]);
        }
    }
    out
}

fn incidence_transpose_raw(m: usize, w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m];
    let mut e = 0;
    for j in 0..m {
        for i in j + 1..m {
            out[i] += w[e];
            out[j] += w[e];
            e += 1;
        }
    }
    out
}

/// `Mv`: pairwise sums `v_i + v_j` in trivec order.
pub fn incidence_apply(m: usize, v: &[f64]) -> Result<Vec<f64>> {
    check_len("incidence_apply", m, v.len())?;
    Ok(incidence_raw(m, v))
}

/// `Mᵗw`: for every node, the sum of `w` over its incident pairs.
pub fn incidence_apply_transpose(m: usize, w: &[f64]) -> Result<Vec<f64>> {
    check_len("incidence_apply_transpose", pair_count(m), w.len())?;
    Ok(incidence_transpose_raw(m, w))
}
