use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operators::CondnumOperator;
use crate::problem::{ExactInverse, ProblemInstance, ProblemMeta, QuadraticLoss};
use crate::projections::ConstraintSet;

/// Largest `min(rows, cols)` accepted by [`singular_values`].
pub const SVD_GUARD: usize = 64;

/// `max(x) / min(x)`; infinite when the smallest entry is zero.
pub fn condition_number(x: &[f64]) -> f64 {
    let max = x.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min = x.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Nearest singular values `x` to `σ` with `max x ≤ c·min x`.
pub fn build_condnum(sigma: &[f64], c: f64) -> Result<ProblemInstance> {
    if sigma.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::contract("singular values must be finite and nonnegative"));
    }
    if sigma.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::contract("singular values must be sorted in descending order"));
    }
    let p = sigma.len();
    let op = CondnumOperator::new(p, c)?;
    Ok(ProblemInstance::new(
        QuadraticLoss::identity(sigma.to_vec()),
        Arc::new(op),
        ConstraintSet::NonPos(p * p),
        sigma.to_vec(),
    )?
    .with_exact_inverse(ExactInverse::Condnum { p, c })
    .with_meta(ProblemMeta::Condnum { sigma: sigma.to_vec(), c }))
}

/// Singular values in descending order by one-sided Jacobi rotations.
pub fn singular_values(mtx: &DMatrix<f64>) -> Result<Vec<f64>> {
    if mtx.iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("matrix entries must be finite"));
    }
    let a = if mtx.nrows() >= mtx.ncols() { mtx.clone() } else { mtx.transpose() };
    let n = a.ncols();
    if n > SVD_GUARD {
        return Err(Error::contract(format!(
            "singular values of a matrix with min dimension {n} exceed the {SVD_GUARD} guard; supply sigma directly"
        )));
    }
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j).iter().copied().collect()).collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = cols[i].iter().map(|v| v * v).sum();
                let beta: f64 = cols[j].iter().map(|v| v * v).sum();
                let gamma: f64 = cols[i].iter().zip(&cols[j]).map(|(u, v)| u * v).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                for (u, v) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*u, *v);
                    *u = c * x - s * y;
                    *v = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}
