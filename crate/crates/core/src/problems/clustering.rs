use std::sync::Arc;

use nalgebra::DMatrix;

use crate::engine::{run_annealing_from, RunResult, SolverConfig};
use crate::error::{check_len, Error, Result};
use crate::operators::ClusteringOperator;
use crate::problem::{ProblemInstance, ProblemMeta, QuadraticLoss};
use crate::projections::ConstraintSet;
use crate::FusionOperator;

/// Symmetric weights `exp(−φ‖x_i − x_j‖²)` on the union of every sample's
/// `k` nearest neighbours, plus the edges of a Euclidean minimum spanning
/// tree so that the weight graph is always connected.
pub fn knn_gaussian_weights(x: &DMatrix<f64>, k: usize, phi: f64) -> Result<DMatrix<f64>> {
    if !(phi > 0.0) {
        return Err(Error::contract(format!("kernel scale {phi} must be positive")));
    }
    let m = x.ncols();
    let d2 = DMatrix::from_fn(m, m, |i, j| (x.column(i) - x.column(j)).norm_squared());
    let mut w = DMatrix::zeros(m, m);
    let kernel = |s: f64| (-phi * s).exp().max(f64::MIN_POSITIVE);
    for i in 0..m {
        let mut others: Vec<usize> = (0..m).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| d2[(i, a)].total_cmp(&d2[(i, b)]).then(a.cmp(&b)));
        for &j in others.iter().take(k) {
            w[(i, j)] = kernel(d2[(i, j)]);
            w[(j, i)] = w[(i, j)];
        }
    }
    // Prim's algorithm on the dense distance matrix
    let mut in_tree = vec![false; m];
    let mut best = vec![(f64::INFINITY, 0usize); m];
    if m > 0 {
        best[0].0 = 0.0;
    }
    for _ in 0..m {
        let v = (0..m)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0))
            .expect("a vertex remains outside the tree");
        in_tree[v] = true;
        if v != 0 {
            let u = best[v].1;
            w[(u, v)] = kernel(d2[(u, v)]);
            w[(v, u)] = w[(u, v)];
        }
        for t in 0..m {
            if !in_tree[t] && d2[(v, t)] < best[t].0 {
                best[t] = (d2[(v, t)], v);
            }
        }
    }
    Ok(w)
}

/// Convex clustering in sparsity form: centroids `U` (columns) near the
/// data `x` with at most `k` nonzero weighted differences `w_ij(u_i − u_j)`.
pub fn build_clustering(x: &DMatrix<f64>, weights: &DMatrix<f64>, k: usize) -> Result<ProblemInstance> {
    let (d, m) = x.shape();
    check_len("weight matrix rows", m, weights.nrows())?;
    let op = ClusteringOperator::from_weight_matrix(d, weights)?;
    if !op.is_connected() {
        return Err(Error::contract("clustering weight graph is disconnected"));
    }
    let pairs = op.pairs().len();
    if k > pairs {
        return Err(Error::contract(format!("k = {k} exceeds the {pairs} retained pairs")));
    }
    let rows = op.rows();
    let target = x.as_slice().to_vec();
    let set = ConstraintSet::ColumnSparsity { block: d, blocks: pairs, k };
    debug_assert_eq!(set.dim(), rows);
    Ok(ProblemInstance::new(QuadraticLoss::identity(target.clone()), Arc::new(op), set, target)?
        .with_meta(ProblemMeta::Clustering { d, m }))
}

/// Centroids closer than this share a label.
pub fn coalescence_tolerance(x: &DMatrix<f64>) -> f64 {
    1e-4 * (1.0 + x.norm() / x.ncols().max(1) as f64)
}

/// Labels from centroid coalescence: `u_i` and `u_j` share a label when
/// `‖u_i − u_j‖ ≤ tol`, closed transitively. Labels are numbered by first
/// appearance.
pub fn cluster_labels(u: &[f64], d: usize, tol: f64) -> Vec<usize> {
    let m = u.len().checked_div(d).unwrap_or(0);
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for i in 0..m {
        for j in 0..i {
            let gap: f64 = (0..d).map(|r| (u[i * d + r] - u[j * d + r]).powi(2)).sum::<f64>().sqrt();
            if gap <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut names = vec![usize::MAX; m];
    let mut next = 0;
    (0..m)
        .map(|v| {
            let root = find(&mut parent, v);
            if names[root] == usize::MAX {
                names[root] = next;
                next += 1;
            }
            names[root]
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ClusterPathEntry {
    pub s: f64,
    pub k: usize,
    /// Centroids, column-major `d × m`.
    pub centroids: Vec<f64>,
    pub labels: Vec<usize>,
    pub clusters: usize,
    pub result: RunResult,
}

#[derive(Clone, Debug)]
pub struct ClusterPath {
    pub k_max: usize,
    pub entries: Vec<ClusterPathEntry>,
}

/// Sparsity search path: solve at `k = round((1 − s)·k_max)`, count the
/// retained pairs whose centroids coalesced, and jump to the proposed
/// level `count / k_max` when it beats `s + s_step`, otherwise step by
/// `s_step`. Each solve warm-starts from the previous centroids.
pub fn cvxclusterpath(
    x: &DMatrix<f64>,
    weights: &DMatrix<f64>,
    s0: f64,
    s_step: f64,
    cfg: &SolverConfig,
) -> Result<ClusterPath> {
    if !(0.0..1.0).contains(&s0) || !(s_step > 0.0) {
        return Err(Error::contract(format!("need 0 <= s0 < 1 and s_step > 0, got {s0}, {s_step}")));
    }
    let d = x.nrows();
    let base = build_clustering(x, weights, 0)?;
    let pairs: Vec<(usize, usize)> = ClusteringOperator::from_weight_matrix(d, weights)?
        .pairs()
        .iter()
        .map(|&(i, j, _)| (i, j))
        .collect();
    let k_max = pairs.len();
    let tol = coalescence_tolerance(x);
    let mut u = base.start.clone();
    let mut entries = Vec::new();
    let mut s = s0;
    while s < 1.0 {
        let k = ((1.0 - s) * k_max as f64).round() as usize;
        let mut problem = base.clone();
        problem.set = ConstraintSet::ColumnSparsity { block: d, blocks: k_max, k };
        let result = run_annealing_from(&problem, cfg, &u)?;
        u.clone_from(&result.x);
        let labels = cluster_labels(&u, d, tol);
        let count = pairs.iter().filter(|&&(i, j)| labels[i] == labels[j]).count();
        let clusters = labels.iter().max().map_or(0, |l| l + 1);
        entries.push(ClusterPathEntry { s, k, centroids: u.clone(), labels, clusters, result });
        let proposal = count as f64 / k_max as f64;
        s = if proposal > s + s_step { proposal } else { s + s_step };
    }
    Ok(ClusterPath { k_max, entries })
}
