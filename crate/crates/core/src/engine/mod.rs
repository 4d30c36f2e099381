//! Inner solvers, Nesterov acceleration and the annealing outer loop.

mod config;
mod driver;
mod eval;
mod steps;
mod trace;

pub use config::{
    AnnealingSchedule, Algorithm, LinearSolver, ProblemKind, SolverConfig, StoppingConfig,
};
pub use driver::{run_annealing, run_annealing_from, run_inner, InnerOutcome, RunResult, StopReason};
pub use eval::{evaluate, gradient_h, objective_h, surrogate_g, Evaluation};
pub use steps::{accelerate, admm_step, mm_step, sd_step, SolverState, StepInfo};
pub use trace::{RunTrace, TraceRow, TRACE_HEADER};
