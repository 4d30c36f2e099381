//! Proximal distance algorithms for minimizing a loss `f(x)` subject to
//! fusion constraints `Dx ∈ S`.
//!
//! The penalized objective `h_ρ(x) = f(x) + ρ/2 · dist(Dx, S)²` is minimized
//! along an annealing path `ρ(t) = min{ρ_max, r^(t-1)}` using one of three
//! interchangeable inner solvers:
//!
//! - [`Algorithm::Mm`]: exact minimization of the distance-majorization
//!   surrogate, phrased as a stacked least-squares problem;
//! - [`Algorithm::SteepestDescent`]: gradient steps with the exact
//!   surrogate line-search length;
//! - [`Algorithm::Admm`]: variable splitting `y = Dx` with an adaptive
//!   step length `μ`.
//!
//! Fusion operators are matrix-free ([`operators`]); the five worked problem
//! families live in [`problems`].
//!
//! With the default `parallel` feature, operator products and a few
//! projections run on the rayon thread pool when the vectors are large
//! enough. Every such routine takes a [`Parallelism`] so the sequential path
//! stays available for comparison.

// `!(x > 0.0)` style checks reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod linalg;
pub mod linsolve;
pub mod metrics;
pub mod operators;
pub mod parallel;
pub mod problem;
pub mod problems;
pub mod projections;

pub use engine::{
    AnnealingSchedule, Algorithm, LinearSolver, RunResult, RunTrace, SolverConfig, StoppingConfig,
    TraceRow,
};
pub use error::{Error, Result};
pub use operators::{FusionOperator, OperatorKind};
pub use parallel::Parallelism;
pub use problem::{ProblemInstance, QuadraticLoss};
pub use projections::ConstraintSet;
