use serde::Serialize;

use super::config::{Algorithm, SolverConfig};
use super::eval::{evaluate, Evaluation};
use super::steps::{accelerate, step, SolverState};
use super::trace::{RunTrace, TraceRow};
use crate::error::Result;
use crate::problem::ProblemInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `dist(Dx, S) ≤ δ_d`.
    Distance,
    /// Distance progress fell below `δ_q(1 + dist_prev)`.
    Progress,
    /// `i_outer` reached without either test passing.
    OuterLimit,
}

#[derive(Clone, Debug)]
pub struct InnerOutcome {
    pub iterations: usize,
    pub linear_iterations: usize,
    /// Evaluation of the final iterate at the subproblem's `ρ`.
    pub eval: Evaluation,
}

/// Runs the configured inner solver at fixed `ρ` until `‖∇h_ρ‖ ≤ δ_h` or
/// `i_inner` steps, appending one trace row per step.
pub fn run_inner(
    problem: &ProblemInstance,
    rho: f64,
    cfg: &SolverConfig,
    state: &mut SolverState,
    outer: usize,
    trace: &mut RunTrace,
) -> Result<InnerOutcome> {
    let par = cfg.parallelism;
    let stop = &cfg.stopping;
    let mut eval = evaluate(problem, &state.x, rho, par)?;
    let mut linear_iterations = 0;
    state.z.clone_from(&state.x);
    if eval.grad_norm <= stop.grad_tol {
        return Ok(InnerOutcome { iterations: 0, linear_iterations, eval });
    }
    state.cache_shadow(rho, eval.clone());
    let momentum = cfg.accelerate && cfg.algorithm != Algorithm::Admm;
    let mut n = 0;
    while n < stop.max_inner {
        n += 1;
        let info = step(problem, state, rho, cfg)?;
        linear_iterations += info.linear_iterations;
        let next = evaluate(problem, &state.x, rho, par)?;
        let coef = if momentum {
            accelerate(state, next.objective < eval.objective, n, stop.nesterov_delay)
        } else {
            state.z.clone_from(&state.x);
            0.0
        };
        trace.push(TraceRow {
            outer,
            inner: n,
            rho,
            loss: next.loss,
            distance: next.distance,
            gradnorm: next.grad_norm,
            step: info.step,
        });
        eval = next;
        if eval.grad_norm <= stop.grad_tol {
            break;
        }
        if coef == 0.0 && cfg.algorithm != Algorithm::Admm {
            state.cache_shadow(rho, eval.clone());
        } else {
            state.clear_cache();
        }
    }
    Ok(InnerOutcome { iterations: n, linear_iterations, eval })
}

#[derive(Clone, Debug, Serialize)]
pub struct RunResult {
    pub x: Vec<f64>,
    pub loss: f64,
    pub distance: f64,
    pub objective: f64,
    pub grad_norm: f64,
    pub rho: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub linear_iterations: usize,
    pub stop: StopReason,
    #[serde(skip)]
    pub trace: RunTrace,
}

impl RunResult {
    /// True when the distance test `dist ≤ δ_d` ended the run.
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Distance
    }
}

/// Annealing outer loop from the problem's start point.
pub fn run_annealing(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<RunResult> {
    run_annealing_from(problem, cfg, &problem.start)
}

/// Annealing outer loop from an explicit start point.
pub fn run_annealing_from(problem: &ProblemInstance, cfg: &SolverConfig, x0: &[f64]) -> Result<RunResult> {
    cfg.validate()?;
    let stop = &cfg.stopping;
    let mut state = SolverState::new(problem, x0, cfg.mu_init)?;
    let mut trace = RunTrace::new();
    let mut prev_distance: Option<f64> = None;
    let (mut inner_total, mut linear_total) = (0, 0);
    let mut t = 0;
    loop {
        t += 1;
        let rho = cfg.schedule.rho(t);
        let inner = run_inner(problem, rho, cfg, &mut state, t, &mut trace)?;
        inner_total += inner.iterations;
        linear_total += inner.linear_iterations;
        let dist = inner.eval.distance;
        let reason = if dist <= stop.dist_tol {
            Some(StopReason::Distance)
        } else if prev_distance.is_some_and(|p| (dist - p).abs() <= stop.progress_tol * (1.0 + p)) {
            Some(StopReason::Progress)
        } else if t >= stop.max_outer {
            Some(StopReason::OuterLimit)
        } else {
            None
        };
        if let Some(reason) = reason {
            let e = inner.eval;
            return Ok(RunResult {
                x: state.x,
                loss: e.loss,
                distance: e.distance,
                objective: e.objective,
                grad_norm: e.grad_norm,
                rho,
                outer_iterations: t,
                inner_iterations: inner_total,
                linear_iterations: linear_total,
                stop: reason,
                trace,
            });
        }
        prev_distance = Some(dist);
    }
}
