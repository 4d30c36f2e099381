use crate::error::{check_len, Result};
use crate::linalg;
use crate::parallel::Parallelism;
use crate::problem::ProblemInstance;

/// Loss, distance, penalized objective and its gradient at one point.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub loss: f64,
    pub distance: f64,
    /// `h_ρ(x)`.
    pub objective: f64,
    pub gradient: Vec<f64>,
    pub grad_norm: f64,
    /// `P(Dx)`, the projection representative used for the gradient.
    pub projection: Vec<f64>,
}

pub fn evaluate(problem: &ProblemInstance, x: &[f64], rho: f64, par: Parallelism) -> Result<Evaluation> {
    check_len("evaluation point", problem.dim(), x.len())?;
    let op = &problem.operator;
    let mut dx = vec![0.0; op.rows()];
    op.apply_to(x, &mut dx, par);
    let mut projection = vec![0.0; dx.len()];
    problem.set.project_into(&dx, &mut projection)?;
    // dx becomes the residual Dx − P(Dx)
    for (r, p) in dx.iter_mut().zip(&projection) {
        *r -= p;
    }
    let distance = linalg::norm(&dx);
    let loss = problem.loss.value(x);
    let mut gradient = vec![0.0; x.len()];
    op.apply_transpose_to(&dx, &mut gradient, par);
    let mut grad_f = vec![0.0; x.len()];
    problem.loss.gradient_into(x, &mut grad_f);
    for (g, gf) in gradient.iter_mut().zip(&grad_f) {
        *g = gf + rho * *g;
    }
    Ok(Evaluation {
        loss,
        distance,
        objective: loss + 0.5 * rho * distance * distance,
        grad_norm: linalg::norm(&gradient),
        gradient,
        projection,
    })
}

/// `h_ρ(x) = f(x) + ρ/2 · dist(Dx, S)²`.
pub fn objective_h(problem: &ProblemInstance, x: &[f64], rho: f64) -> Result<f64> {
    Ok(evaluate(problem, x, rho, Parallelism::default())?.objective)
}

/// `∇h_ρ(x) = ∇f(x) + ρDᵗ[Dx − P(Dx)]`.
pub fn gradient_h(problem: &ProblemInstance, x: &[f64], rho: f64) -> Result<Vec<f64>> {
    Ok(evaluate(problem, x, rho, Parallelism::default())?.gradient)
}

/// `g_ρ(x | anchor) = f(x) + ρ/2 · ‖Dx − P(D·anchor)‖²`.
pub fn surrogate_g(problem: &ProblemInstance, x: &[f64], anchor: &[f64], rho: f64) -> Result<f64> {
    check_len("surrogate anchor", problem.dim(), anchor.len())?;
    let target = problem.set.project(&problem.operator.apply(anchor)?)?;
    let dx = problem.operator.apply(x)?;
    Ok(problem.loss.value(x) + 0.5 * rho * linalg::dist(&dx, &target).powi(2))
}
