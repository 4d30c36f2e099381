use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};
use crate::operators::SparseOperator;
use crate::problem::{ProblemInstance, ProblemMeta, QuadraticLoss};
use crate::projections::ConstraintSet;

/// Hyperplane operator on `v = [θ; ξ_1; …; ξ_m]` for predictors stored as
/// the columns of the `d × m` matrix `x`.
///
/// Rows run over ordered pairs `i ≠ j`, `i`-major, and hold
/// `θ_j − θ_i + ⟨x_i − x_j, ξ_j⟩`.
pub fn cvxreg_operator(x: &DMatrix<f64>) -> Result<SparseOperator> {
    let (d, m) = x.shape();
    let mut triplets = Vec::with_capacity(m * (m - 1) * (2 + d));
    let mut row = 0;
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            triplets.push((row, j, 1.0));
            triplets.push((row, i, -1.0));
            for r in 0..d {
                let diff = x[(r, i)] - x[(r, j)];
                if diff != 0.0 {
                    triplets.push((row, m + j * d + r, diff));
                }
            }
            row += 1;
        }
    }
    SparseOperator::from_triplets(m * (m - 1), m * (1 + d), triplets)
}

/// Convex regression: fit values `θ` and subgradients `Ξ` at the `m`
/// predictors (columns of `x`) so that every supporting-hyperplane
/// inequality holds. The loss only sees `θ`.
pub fn build_cvxreg(x: &DMatrix<f64>, y: &[f64]) -> Result<ProblemInstance> {
    let (d, m) = x.shape();
    if m < 2 {
        return Err(Error::contract("convex regression needs at least two samples"));
    }
    check_len("responses", m, y.len())?;
    let op = cvxreg_operator(x)?;
    let dim = m * (1 + d);
    let loss = QuadraticLoss::leading(y.to_vec(), dim)?;
    let start = loss.target().to_vec();
    Ok(ProblemInstance::new(loss, Arc::new(op), ConstraintSet::NonPos(m * (m - 1)), start)?
        .with_meta(ProblemMeta::Cvxreg { m, d }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FusionOperator;

    #[test]
    fn two_point_rows() {
        let x = DMatrix::from_row_slice(1, 2, &[0.5, 2.0]);
        let dense = cvxreg_operator(&x).unwrap().materialize_dense().unwrap();
        assert_eq!(dense.shape(), (2, 4));
        // (i=0, j=1): θ_1 − θ_0 + (x_0 − x_1) ξ_1
        assert_eq!(dense.row(0).iter().copied().collect::<Vec<_>>(), vec![-1.0, 1.0, 0.0, -1.5]);
        // (i=1, j=0): θ_0 − θ_1 + (x_1 − x_0) ξ_0
        assert_eq!(dense.row(1).iter().copied().collect::<Vec<_>>(), vec![1.0, -1.0, 1.5, 0.0]);
    }

    #[test]
    fn convex_truth_is_feasible() {
        // f(x) = x² with gradients 2x
        let xs = [-1.0, -0.3, 0.4, 1.2];
        let x = DMatrix::from_row_slice(1, 4, &xs);
        let y: Vec<f64> = xs.iter().map(|v| v * v).collect();
        let p = build_cvxreg(&x, &y).unwrap();
        let mut v = y.clone();
        v.extend(xs.iter().map(|v| 2.0 * v));
        assert_eq!(p.loss.value(&v), 0.0);
        assert!(p.set.distance(&p.operator.apply(&v).unwrap()).unwrap() == 0.0);
    }

    #[test]
    fn too_few_samples() {
        assert!(build_cvxreg(&DMatrix::zeros(1, 1), &[0.0]).is_err());
    }
}
