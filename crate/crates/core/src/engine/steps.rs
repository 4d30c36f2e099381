use super::config::{Algorithm, LinearSolver, SolverConfig};
use super::eval::{evaluate, Evaluation};
use crate::error::{check_len, Error, Result};
use crate::linalg::{self, axpy, dot, norm};
use crate::linsolve::{cg_solve, lsqr_solve, LinearMap, SymmetricOperator};
use crate::operators::FusionOperator;
use crate::parallel::Parallelism;
use crate::problem::{ProblemInstance, QuadraticLoss};
use crate::projections::prox_scaled_distance;

/// Iterates and auxiliary blocks carried between inner steps.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub x: Vec<f64>,
    /// Previous iterate `x_n`.
    pub x_prev: Vec<f64>,
    /// Shadow iterate the next MM or SD step starts from.
    pub z: Vec<f64>,
    /// Nesterov counter `i`.
    pub nesterov: usize,
    /// ADMM split variable `y ≈ Dx`.
    pub y: Vec<f64>,
    /// ADMM multiplier in scaled form.
    pub lambda: Vec<f64>,
    pub mu: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// ADMM steps taken so far, across outer iterations.
    pub admm_count: usize,
    // evaluation of z at the given ρ, reused by the next step
    cached: Option<(f64, Evaluation)>,
}

impl SolverState {
    pub fn new(problem: &ProblemInstance, x0: &[f64], mu: f64) -> Result<Self> {
        check_len("initial point", problem.dim(), x0.len())?;
        let y = problem.operator.apply(x0)?;
        Ok(Self {
            x: x0.to_vec(),
            x_prev: x0.to_vec(),
            z: x0.to_vec(),
            nesterov: 1,
            lambda: vec![0.0; y.len()],
            y,
            mu,
            primal_residual: 0.0,
            dual_residual: 0.0,
            admm_count: 0,
            cached: None,
        })
    }

    fn advance(&mut self, next: Vec<f64>) {
        self.x_prev = std::mem::replace(&mut self.x, next);
        self.cached = None;
    }

    /// Records that `z` coincides with `x` and has been evaluated at `rho`.
    pub(crate) fn cache_shadow(&mut self, rho: f64, eval: Evaluation) {
        self.cached = Some((rho, eval));
    }

    pub(crate) fn clear_cache(&mut self) {
        self.cached = None;
    }

    fn shadow_eval(&mut self, problem: &ProblemInstance, rho: f64, par: Parallelism) -> Result<Evaluation> {
        match self.cached.take() {
            Some((r, e)) if r == rho => Ok(e),
            _ => evaluate(problem, &self.z, rho, par),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepInfo {
    /// Step length `t` for SD, `μ` after adaptation for ADMM, `None` for MM.
    pub step: Option<f64>,
    pub linear_iterations: usize,
}

/// `x ↦ Wx + ρDᵗDx`.
struct PenalizedGram<'a> {
    loss: &'a QuadraticLoss,
    op: &'a dyn FusionOperator,
    rho: f64,
    par: Parallelism,
}

impl SymmetricOperator for PenalizedGram<'_> {
    fn dim(&self) -> usize {
        self.loss.dim()
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64]) {
        self.op.apply_gram_to(x, out, self.par);
        for ((o, xi), wi) in out.iter_mut().zip(x).zip(self.loss.weights()) {
            *o = wi * xi + self.rho * *o;
        }
    }
}

/// `[W^{1/2}; √ρ D]`.
struct StackedLeastSquares<'a> {
    sqrt_w: Vec<f64>,
    op: &'a dyn FusionOperator,
    sqrt_rho: f64,
    par: Parallelism,
}

impl LinearMap for StackedLeastSquares<'_> {
    fn rows(&self) -> usize {
        self.sqrt_w.len() + self.op.rows()
    }
    fn cols(&self) -> usize {
        self.sqrt_w.len()
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64]) {
        let (top, bottom) = out.split_at_mut(self.sqrt_w.len());
        for ((o, xi), s) in top.iter_mut().zip(x).zip(&self.sqrt_w) {
            *o = s * xi;
        }
        self.op.apply_to(x, bottom, self.par);
        bottom.iter_mut().for_each(|v| *v *= self.sqrt_rho);
    }
    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64]) {
        let (top, bottom) = y.split_at(self.sqrt_w.len());
        self.op.apply_transpose_to(bottom, out, self.par);
        for ((o, t), s) in out.iter_mut().zip(top).zip(&self.sqrt_w) {
            *o = s * t + self.sqrt_rho * *o;
        }
    }
}

/// Solves `(W + ρDᵗD)x = Wc + ρDᵗq` in place, warm-started from `x`.
fn solve_penalized(
    problem: &ProblemInstance,
    rho: f64,
    q: &[f64],
    x: &mut [f64],
    cfg: &SolverConfig,
) -> Result<usize> {
    let op = problem.operator.as_ref();
    let par = cfg.parallelism;
    let max_iter = cfg.linear_max_iter.unwrap_or(2 * problem.dim() + 100);
    let exact = problem.usable_exact_inverse();
    let method = match (cfg.linear_solver, exact) {
        (LinearSolver::Auto, Some(_)) => LinearSolver::Exact,
        (LinearSolver::Auto, None) => LinearSolver::Cg,
        (LinearSolver::Exact, None) => {
            return Err(Error::contract("no closed-form inverse for this problem and loss"))
        }
        (m, _) => m,
    };
    if method == LinearSolver::Lsqr {
        let sqrt_w: Vec<f64> = problem.loss.weights().iter().map(|w| w.sqrt()).collect();
        let mut b: Vec<f64> = sqrt_w.iter().zip(problem.loss.target()).map(|(s, c)| s * c).collect();
        let sqrt_rho = rho.sqrt();
        b.extend(q.iter().map(|v| sqrt_rho * v));
        let a = StackedLeastSquares { sqrt_w, op, sqrt_rho, par };
        return Ok(lsqr_solve(&a, &b, x, cfg.linear_tol, max_iter)?.iterations);
    }
    let mut rhs = vec![0.0; problem.dim()];
    op.apply_transpose_to(q, &mut rhs, par);
    for ((r, c), w) in rhs.iter_mut().zip(problem.loss.target()).zip(problem.loss.weights()) {
        *r = w * c + rho * *r;
    }
    match method {
        LinearSolver::Exact => {
            let sol = exact.expect("exact inverse checked above").solve(rho, &rhs)?;
            x.copy_from_slice(&sol);
            Ok(0)
        }
        _ => {
            let a = PenalizedGram { loss: &problem.loss, op, rho, par };
            Ok(cg_solve(&a, &rhs, x, cfg.linear_tol, max_iter)?.iterations)
        }
    }
}

/// One MM step from the shadow iterate: minimizes `g_ρ(· | z)`.
pub fn mm_step(problem: &ProblemInstance, state: &mut SolverState, rho: f64, cfg: &SolverConfig) -> Result<StepInfo> {
    let shadow = state.shadow_eval(problem, rho, cfg.parallelism)?;
    let mut next = state.z.clone();
    match solve_penalized(problem, rho, &shadow.projection, &mut next, cfg) {
        Ok(iters) => {
            state.advance(next);
            Ok(StepInfo { step: None, linear_iterations: iters })
        }
        Err(Error::Stagnation { .. } | Error::Divergence(_)) if cfg.sd_fallback => {
            state.cache_shadow(rho, shadow);
            sd_step(problem, state, rho, cfg)
        }
        Err(e) => Err(e),
    }
}

/// One steepest-descent step from the shadow iterate with the exact
/// surrogate step length `‖v‖² / (vᵗWv + ρ‖Dv‖²)`.
pub fn sd_step(problem: &ProblemInstance, state: &mut SolverState, rho: f64, cfg: &SolverConfig) -> Result<StepInfo> {
    let shadow = state.shadow_eval(problem, rho, cfg.parallelism)?;
    let v = &shadow.gradient;
    let vv = dot(v, v);
    if vv == 0.0 {
        let z = state.z.clone();
        state.advance(z);
        return Ok(StepInfo { step: Some(0.0), linear_iterations: 0 });
    }
    let mut wv = vec![0.0; v.len()];
    problem.loss.curvature_into(v, &mut wv);
    let mut dv = vec![0.0; problem.operator.rows()];
    problem.operator.apply_to(v, &mut dv, cfg.parallelism);
    let denom = dot(v, &wv) + rho * dot(&dv, &dv);
    if !(denom > 0.0) {
        return Err(Error::DegenerateCurvature { grad_norm: vv.sqrt() });
    }
    let t = vv / denom;
    let mut next = state.z.clone();
    axpy(-t, v, &mut next);
    state.advance(next);
    Ok(StepInfo { step: Some(t), linear_iterations: 0 })
}

/// One ADMM sweep (x, y and scaled multiplier updates) followed by the
/// residual-balancing update of `μ`.
pub fn admm_step(problem: &ProblemInstance, state: &mut SolverState, rho: f64, cfg: &SolverConfig) -> Result<StepInfo> {
    let op = problem.operator.as_ref();
    let par = cfg.parallelism;
    let mu = state.mu;
    let q = linalg::sub(&state.y, &state.lambda);
    let mut next = state.x.clone();
    let iters = solve_penalized(problem, mu, &q, &mut next, cfg)?;

    let mut dx = vec![0.0; op.rows()];
    op.apply_to(&next, &mut dx, par);
    let shifted: Vec<f64> = dx.iter().zip(&state.lambda).map(|(a, l)| a + l).collect();
    let y_new = prox_scaled_distance(&shifted, rho / mu, &problem.set)?;

    let r: Vec<f64> = dx.iter().zip(&y_new).map(|(a, b)| a - b).collect();
    axpy(1.0, &r, &mut state.lambda);
    let dy = linalg::sub(&state.y, &y_new);
    let mut s = vec![0.0; problem.dim()];
    op.apply_transpose_to(&dy, &mut s, par);
    let (r_norm, s_norm) = (norm(&r), mu * norm(&s));

    state.admm_count += 1;
    let due = cfg.mu_interval > 0 && state.admm_count.is_multiple_of(cfg.mu_interval);
    let mu_new = if !cfg.adapt_mu || !due {
        mu
    } else if r_norm > 10.0 * s_norm {
        2.0 * mu
    } else if 10.0 * r_norm < s_norm {
        0.5 * mu
    } else {
        mu
    };
    if mu_new != mu {
        let scale = mu / mu_new;
        state.lambda.iter_mut().for_each(|l| *l *= scale);
    }
    state.y = y_new;
    state.mu = mu_new;
    state.primal_residual = r_norm;
    state.dual_residual = s_norm;
    state.advance(next);
    state.z.clone_from(&state.x);
    Ok(StepInfo { step: Some(mu_new), linear_iterations: iters })
}

/// Sets the shadow iterate after a step and returns the momentum
/// coefficient used (0 on reset).
///
/// With `decreased` (`h_ρ(x_{n+1}) < h_ρ(x_n)`) and `n ≥ delay`:
/// `z = x_{n+1} + (i−1)/(i+2)·(x_{n+1} − x_n)` and `i += 1`; otherwise
/// `z = x_{n+1}` and `i = 1`.
pub fn accelerate(state: &mut SolverState, decreased: bool, n: usize, delay: usize) -> f64 {
    if decreased && n >= delay {
        let i = state.nesterov as f64;
        let coef = (i - 1.0) / (i + 2.0);
        for ((z, x), xp) in state.z.iter_mut().zip(&state.x).zip(&state.x_prev) {
            *z = x + coef * (x - xp);
        }
        state.nesterov += 1;
        coef
    } else {
        state.z.clone_from(&state.x);
        state.nesterov = 1;
        0.0
    }
}

pub(crate) fn step(problem: &ProblemInstance, state: &mut SolverState, rho: f64, cfg: &SolverConfig) -> Result<StepInfo> {
    match cfg.algorithm {
        Algorithm::Mm => mm_step(problem, state, rho, cfg),
        Algorithm::SteepestDescent => sd_step(problem, state, rho, cfg),
        Algorithm::Admm => admm_step(problem, state, rho, cfg),
    }
}
