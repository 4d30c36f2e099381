use std::sync::Arc;

use nalgebra::DMatrix;

use crate::engine::{run_annealing_from, RunResult, SolverConfig};
use crate::error::{check_len, Error, Result};
use crate::metrics;
use crate::operators::TvOperator;
use crate::problem::{ProblemInstance, ProblemMeta, QuadraticLoss};
use crate::projections::ConstraintSet;
use crate::FusionOperator;

/// Anisotropic total variation `Σ|U[r+1,c] − U[r,c]| + Σ|U[r,c+1] − U[r,c]|`
/// of a column-major `m × p` image.
pub fn tv_norm(u: &[f64], m: usize, p: usize) -> Result<f64> {
    let op = TvOperator::new(m, p);
    let du = op.apply(u)?;
    Ok(du[..op.difference_rows()].iter().map(|v| v.abs()).sum())
}

/// Total-variation denoising: `min ½‖u − w‖²` subject to `TV(u) ≤ γ`.
/// The appended last-pixel row of `D` is left unconstrained.
pub fn build_denoise(image: &DMatrix<f64>, gamma: f64) -> Result<ProblemInstance> {
    if !(gamma >= 0.0) {
        return Err(Error::contract(format!("TV budget {gamma} must be nonnegative")));
    }
    let (m, p) = image.shape();
    if m * p == 0 {
        return Err(Error::contract("empty image"));
    }
    let w = image.as_slice().to_vec();
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("pixel values must be finite"));
    }
    let op = TvOperator::new(m, p);
    let set = ConstraintSet::Product(vec![
        ConstraintSet::L1Ball { dim: op.difference_rows(), radius: gamma },
        ConstraintSet::Free(1),
    ]);
    Ok(ProblemInstance::new(QuadraticLoss::identity(w.clone()), Arc::new(op), set, w)?
        .with_meta(ProblemMeta::Denoise { rows: m, cols: p, gamma }))
}

#[derive(Clone, Debug)]
pub struct DenoiseLevel {
    pub s: f64,
    pub gamma: f64,
    /// Column-major restored image.
    pub image: Vec<f64>,
    pub tv: f64,
    /// Against `reference` when given, else against the input.
    pub mse: f64,
    pub psnr: f64,
    pub result: RunResult,
}

/// Solves at `γ = (1 − s)·TV(input)` for each level in order, warm-starting
/// each solve from the previous image.
pub fn denoise_path(
    image: &DMatrix<f64>,
    levels: &[f64],
    cfg: &SolverConfig,
    reference: Option<&DMatrix<f64>>,
    peak: f64,
) -> Result<Vec<DenoiseLevel>> {
    let (m, p) = image.shape();
    if let Some(r) = reference {
        check_len("reference rows", m, r.nrows())?;
        check_len("reference cols", p, r.ncols())?;
    }
    if let Some(s) = levels.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::contract(format!("path level {s} outside [0, 1]")));
    }
    let compare = reference.unwrap_or(image).as_slice();
    let gamma0 = tv_norm(image.as_slice(), m, p)?;
    let mut u = image.as_slice().to_vec();
    let mut out = Vec::with_capacity(levels.len());
    for &s in levels {
        let gamma = (1.0 - s) * gamma0;
        let problem = build_denoise(image, gamma)?;
        let result = run_annealing_from(&problem, cfg, &u)?;
        u.clone_from(&result.x);
        out.push(DenoiseLevel {
            s,
            gamma,
            tv: tv_norm(&u, m, p)?,
            mse: metrics::mse(&u, compare)?,
            psnr: metrics::psnr(&u, compare, peak)?,
            image: u.clone(),
            result,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_of_small_image() {
        // U = [1 2; 4 8] → |3| + |6| + |1| + |4|
        assert_eq!(tv_norm(&[1.0, 4.0, 2.0, 8.0], 2, 2).unwrap(), 14.0);
        assert_eq!(tv_norm(&[0.3; 12], 3, 4).unwrap(), 0.0);
    }

    #[test]
    fn set_exempts_last_row() {
        let p = build_denoise(&DMatrix::from_element(3, 3, 0.5), 0.0).unwrap();
        assert_eq!(p.set.dim(), 13);
        let du = p.operator.apply(&p.start).unwrap();
        assert_eq!(p.set.distance(&du).unwrap(), 0.0);
    }
}
