//! Problem instances: a quadratic loss, a fusion operator and a constraint set.

use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::linsolve;
use crate::operators::FusionOperator;
use crate::projections::ConstraintSet;

/// `f(x) = ½ Σ w_i (x_i − c_i)²` with diagonal weights `w ≥ 0`.
///
/// Coordinates with zero weight are unobserved (the `Ξ` block of convex
/// regression, for instance).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticLoss {
    weights: Vec<f64>,
    target: Vec<f64>,
    unit: bool,
}

impl QuadraticLoss {
    /// `½‖x − c‖²`.
    pub fn identity(target: Vec<f64>) -> Self {
        Self {
            weights: vec![1.0; target.len()],
            target,
            unit: true,
        }
    }

    pub fn weighted(weights: Vec<f64>, target: Vec<f64>) -> Result<Self> {
        check_len("loss weights", target.len(), weights.len())?;
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::contract(format!("loss weight {w} must be finite and nonnegative")));
        }
        let unit = weights.iter().all(|&w| w == 1.0);
        Ok(Self {
            weights,
            target,
            unit,
        })
    }

    /// `½‖x[..n] − c‖²` on the first `n = c.len()` of `dim` coordinates.
    pub fn leading(target: Vec<f64>, dim: usize) -> Result<Self> {
        if target.len() > dim {
            return Err(Error::contract("observed block longer than the variable"));
        }
        let mut weights = vec![0.0; dim];
        weights[..target.len()].iter_mut().for_each(|w| *w = 1.0);
        let mut full = target;
        full.resize(dim, 0.0);
        Self::weighted(weights, full)
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// True when every weight is one, so `W = I`.
    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * x
            .iter()
            .zip(&self.target)
            .zip(&self.weights)
            .map(|((xi, ci), wi)| wi * (xi - ci) * (xi - ci))
            .sum::<f64>()
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (((o, xi), ci), wi) in out.iter_mut().zip(x).zip(&self.target).zip(&self.weights) {
            *o = wi * (xi - ci);
        }
    }

    /// `out = W v`.
    pub fn curvature_into(&self, v: &[f64], out: &mut [f64]) {
        for ((o, vi), wi) in out.iter_mut().zip(v).zip(&self.weights) {
            *o = wi * vi;
        }
    }

    /// `W c`.
    pub fn weighted_target(&self) -> Vec<f64> {
        self.target.iter().zip(&self.weights).map(|(c, w)| c * w).collect()
    }
}

/// Closed-form `[I + ρDᵗD]⁻¹` available for some operators when `W = I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExactInverse {
    Metric { m: usize },
    Condnum { p: usize, c: f64 },
}

impl ExactInverse {
    pub fn solve(&self, rho: f64, b: &[f64]) -> Result<Vec<f64>> {
        match *self {
            ExactInverse::Metric { m } => linsolve::metric_inverse_apply(m, rho, b),
            ExactInverse::Condnum { p, c } => linsolve::condnum_inverse_apply(p, c, rho, b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemMeta {
    Generic,
    Metric { m: usize },
    Cvxreg { m: usize, d: usize },
    Clustering { d: usize, m: usize },
    Denoise { rows: usize, cols: usize, gamma: f64 },
    Condnum { sigma: Vec<f64>, c: f64 },
}

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub loss: QuadraticLoss,
    pub operator: Arc<dyn FusionOperator>,
    pub set: ConstraintSet,
    pub start: Vec<f64>,
    pub exact_inverse: Option<ExactInverse>,
    pub meta: ProblemMeta,
}

impl ProblemInstance {
    pub fn new(
        loss: QuadraticLoss,
        operator: Arc<dyn FusionOperator>,
        set: ConstraintSet,
        start: Vec<f64>,
    ) -> Result<Self> {
        check_len("operator columns vs loss dimension", loss.dim(), operator.cols())?;
        check_len("constraint dimension vs operator rows", operator.rows(), set.dim())?;
        check_len("start point", loss.dim(), start.len())?;
        Ok(Self {
            loss,
            operator,
            set,
            start,
            exact_inverse: None,
            meta: ProblemMeta::Generic,
        })
    }

    pub fn with_meta(mut self, meta: ProblemMeta) -> Self {
        self.meta = meta;
        self
    }

    /// Enables the closed-form solve; it is only used while `W = I`.
    pub fn with_exact_inverse(mut self, inv: ExactInverse) -> Self {
        self.exact_inverse = Some(inv);
        self
    }

    pub fn dim(&self) -> usize {
        self.loss.dim()
    }

    /// The closed-form inverse when it applies to this loss.
    pub fn usable_exact_inverse(&self) -> Option<ExactInverse> {
        self.exact_inverse.filter(|_| self.loss.is_unit())
    }
}
