use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::Parallelism;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Mm,
    #[serde(rename = "sd")]
    SteepestDescent,
    Admm,
}

/// How the `(W + ρDᵗD)x = b` systems of MM and ADMM are solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearSolver {
    /// The closed-form inverse when the problem has one, else CG.
    Auto,
    Cg,
    Lsqr,
    Exact,
}

/// The five worked problem families, used to pick default controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Metric,
    Cvxreg,
    Clustering,
    Denoise,
    Condnum,
}

/// `ρ(t) = min{ρ_max, r^(t−1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealingSchedule {
    pub multiplier: f64,
    pub rho_max: f64,
}

impl AnnealingSchedule {
    pub const DEFAULT_RHO_MAX: f64 = 1e8;

    pub fn new(multiplier: f64, rho_max: f64) -> Result<Self> {
        if !(multiplier > 1.0) || !(rho_max >= 1.0) {
            return Err(Error::contract(format!(
                "schedule needs r > 1 and rho_max >= 1, got r = {multiplier}, rho_max = {rho_max}"
            )));
        }
        Ok(Self {
            multiplier,
            rho_max,
        })
    }

    pub fn for_problem(kind: ProblemKind) -> Self {
        let multiplier = match kind {
            ProblemKind::Denoise => 1.5,
            _ => 1.2,
        };
        Self {
            multiplier,
            rho_max: Self::DEFAULT_RHO_MAX,
        }
    }

    /// Penalty at outer iteration `t ≥ 1`.
    pub fn rho(&self, t: usize) -> f64 {
        let exponent = t.saturating_sub(1).min(i32::MAX as usize) as i32;
        self.multiplier.powi(exponent).min(self.rho_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingConfig {
    /// `δ_h`: inner loop stops once `‖∇h_ρ‖` is at most this.
    pub grad_tol: f64,
    /// `δ_d`: outer loop stops once `dist(Dx, S)` is at most this.
    pub dist_tol: f64,
    /// `δ_q`: outer loop stops once the distance changes by at most `δ_q(1 + dist_prev)`.
    pub progress_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Inner iterations before Nesterov momentum may engage.
    pub nesterov_delay: usize,
}

impl StoppingConfig {
    pub const DEFAULT_NESTEROV_DELAY: usize = 10;

    pub fn for_problem(kind: ProblemKind) -> Self {
        let (grad_tol, dist_tol, max_outer, max_inner) = match kind {
            ProblemKind::Metric => (1e-3, 1e-2, 200, 100_000),
            ProblemKind::Cvxreg => (1e-3, 1e-2, 200, 10_000),
            ProblemKind::Clustering => (1e-2, 1e-5, 100, 10_000),
            ProblemKind::Denoise => (1e-1, 1e-1, 100, 10_000),
            ProblemKind::Condnum => (1e-3, 1e-2, 200, 10_000),
        };
        Self {
            grad_tol,
            dist_tol,
            progress_tol: 1e-6,
            max_outer,
            max_inner,
            nesterov_delay: Self::DEFAULT_NESTEROV_DELAY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tols = [self.grad_tol, self.dist_tol, self.progress_tol];
        if tols.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::contract("stopping tolerances must be nonnegative"));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::contract("iteration caps must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub linear_solver: LinearSolver,
    pub stopping: StoppingConfig,
    pub schedule: AnnealingSchedule,
    /// Nesterov momentum for MM and SD; ADMM never accelerates.
    pub accelerate: bool,
    /// Relative tolerance of the iterative linear solves.
    pub linear_tol: f64,
    /// Iteration cap of the iterative linear solves; `None` means `2·dim + 100`.
    pub linear_max_iter: Option<usize>,
    /// Replace a failed MM linear solve with a steepest-descent step.
    pub sd_fallback: bool,
    /// Initial ADMM step length `μ`.
    pub mu_init: f64,
    /// Residual balancing of `μ`; off keeps `μ = mu_init`.
    pub adapt_mu: bool,
    /// Balance residuals only every this many ADMM steps. Rebalancing every
    /// step lets `μ` chatter on badly scaled operators.
    pub mu_interval: usize,
    #[serde(skip, default)]
    pub parallelism: Parallelism,
}

impl SolverConfig {
    pub fn for_problem(kind: ProblemKind, algorithm: Algorithm) -> Self {
        let stopping = StoppingConfig::for_problem(kind);
        Self {
            algorithm,
            linear_solver: LinearSolver::Auto,
            stopping,
            schedule: AnnealingSchedule::for_problem(kind),
            accelerate: true,
            linear_tol: Self::linear_tol_for(stopping.grad_tol),
            linear_max_iter: None,
            sd_fallback: false,
            mu_init: 1.0,
            adapt_mu: true,
            mu_interval: 10,
            parallelism: Parallelism::default(),
        }
    }

    /// `min(1e-8, 1e-2·δ_h)`.
    pub fn linear_tol_for(grad_tol: f64) -> f64 {
        let t = (1e-2 * grad_tol).min(1e-8);
        if t > 0.0 {
            t
        } else {
            1e-14
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.stopping.validate()?;
        AnnealingSchedule::new(self.schedule.multiplier, self.schedule.rho_max)?;
        if !(self.linear_tol > 0.0) {
            return Err(Error::contract("linear tolerance must be positive"));
        }
        if !(self.mu_init > 0.0) {
            return Err(Error::contract("initial ADMM step length must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values() {
        let s = AnnealingSchedule::for_problem(ProblemKind::Metric);
        assert_eq!(s.rho(1), 1.0);
        assert!((s.rho(5) - 2.0736).abs() < 1e-12);
        assert_eq!(s.rho(10_000), 1e8);
        let mut prev = 0.0;
        for t in 1..200 {
            assert!(s.rho(t) >= prev);
            prev = s.rho(t);
        }
    }

    #[test]
    fn table_rows() {
        let c = StoppingConfig::for_problem(ProblemKind::Clustering);
        assert_eq!((c.grad_tol, c.dist_tol, c.progress_tol), (1e-2, 1e-5, 1e-6));
        assert_eq!((c.max_outer, c.max_inner), (100, 10_000));
        assert_eq!(StoppingConfig::for_problem(ProblemKind::Metric).max_inner, 100_000);
        assert_eq!(AnnealingSchedule::for_problem(ProblemKind::Denoise).multiplier, 1.5);
        assert_eq!(SolverConfig::for_problem(ProblemKind::Denoise, Algorithm::Mm).linear_tol, 1e-8);
    }

    #[test]
    fn rejects_bad_controls() {
        assert!(AnnealingSchedule::new(1.0, 1e8).is_err());
        let mut c = SolverConfig::for_problem(ProblemKind::Cvxreg, Algorithm::Admm);
        c.stopping.max_inner = 0;
        assert!(c.validate().is_err());
    }
}
