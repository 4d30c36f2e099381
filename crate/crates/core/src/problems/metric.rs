use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};
use crate::operators::{pair_count, IdentityOperator, StackedOperator, TriangleOperator};
use crate::problem::{ExactInverse, ProblemInstance, ProblemMeta, QuadraticLoss};
use crate::projections::ConstraintSet;

const SYMMETRY_TOL: f64 = 1e-12;

/// Strict lower triangle of a symmetric zero-diagonal matrix, column-major.
pub fn trivec(x: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = x.nrows();
    check_len("trivec columns", m, x.ncols())?;
    let mut out = Vec::with_capacity(pair_count(m));
    for j in 0..m {
        for i in j + 1..m {
            if (x[(i, j)] - x[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::contract(format!("matrix is not symmetric at ({i}, {j})")));
            }
            out.push(x[(i, j)]);
        }
    }
    Ok(out)
}

/// Inverse of [`trivec`]: a symmetric `m × m` matrix with zero diagonal.
pub fn untrivec(m: usize, v: &[f64]) -> Result<DMatrix<f64>> {
    check_len("untrivec", pair_count(m), v.len())?;
    let mut x = DMatrix::zeros(m, m);
    let mut k = 0;
    for j in 0..m {
        for i in j + 1..m {
            x[(i, j)] = v[k];
            x[(j, i)] = v[k];
            k += 1;
        }
    }
    Ok(x)
}

/// Metric projection: the nearest (in weighted least squares) dissimilarity
/// matrix satisfying all triangle inequalities and nonnegativity.
///
/// `D = [T; I]` and `S = {Tx ≤ 0} × {x ≥ 0}`. With unit weights the MM and
/// ADMM linear systems use the closed-form inverse.
pub fn build_metric(y: &DMatrix<f64>, w: Option<&DMatrix<f64>>) -> Result<ProblemInstance> {
    let m = y.nrows();
    let target = trivec(y)?;
    if target.iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("dissimilarities must be finite"));
    }
    let loss = match w {
        None => QuadraticLoss::identity(target.clone()),
        Some(w) => {
            check_len("metric weight rows", m, w.nrows())?;
            QuadraticLoss::weighted(trivec(w)?, target.clone())?
        }
    };
    let n = pair_count(m);
    let tri = TriangleOperator::new(m);
    let tri_rows = crate::FusionOperator::rows(&tri);
    let op = StackedOperator::new(vec![Arc::new(tri), Arc::new(IdentityOperator::new(n))])?;
    let set = ConstraintSet::Product(vec![ConstraintSet::NonPos(tri_rows), ConstraintSet::NonNeg(n)]);
    Ok(ProblemInstance::new(loss, Arc::new(op), set, target)?
        .with_exact_inverse(ExactInverse::Metric { m })
        .with_meta(ProblemMeta::Metric { m }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivec_example_and_round_trip() {
        let x = untrivec(3, &[4.0, 1.0, 1.0]).unwrap();
        assert_eq!(x[(1, 0)], 4.0);
        assert_eq!(x[(2, 0)], 1.0);
        assert_eq!(x[(2, 1)], 1.0);
        assert_eq!(trivec(&x).unwrap(), vec![4.0, 1.0, 1.0]);
        assert_eq!(trivec(&DMatrix::zeros(4, 4)).unwrap(), vec![0.0; 6]);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let mut x = DMatrix::zeros(3, 3);
        x[(1, 0)] = 1.0;
        assert!(trivec(&x).is_err());
    }

    #[test]
    fn sixteen_node_dimensions() {
        let p = build_metric(&DMatrix::zeros(16, 16), None).unwrap();
        assert_eq!(p.operator.rows(), 120 + 1680);
        assert_eq!(p.operator.cols(), 120);
        assert!(p.usable_exact_inverse().is_some());
    }

    #[test]
    fn negative_weights_rejected() {
        let y = untrivec(3, &[4.0, 1.0, 1.0]).unwrap();
        let w = untrivec(3, &[1.0, -1.0, 1.0]).unwrap();
        assert!(build_metric(&y, Some(&w)).is_err());
        let w = untrivec(3, &[1.0, 2.0, 1.0]).unwrap();
        assert!(build_metric(&y, Some(&w)).unwrap().usable_exact_inverse().is_none());
    }
}
