//! Linear solvers for the `H + ρDᵗD` systems of the MM and ADMM updates.

use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, dot, norm};
use crate::operators::{incidence_apply, incidence_apply_transpose, pair_count};

/// Iterations without a new best residual before CG gives up.
pub const STAGNATION_WINDOW: usize = 50;

/// A symmetric linear map `x ↦ Ax` on `R^dim`.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    fn apply_to(&self, x: &[f64], out: &mut [f64]);
}

/// A rectangular linear map with its transpose, as used by LSQR.
pub trait LinearMap: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply_to(&self, x: &[f64], out: &mut [f64]);
    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64]);
}

impl SymmetricOperator for nalgebra::DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

impl LinearMap for nalgebra::DMatrix<f64> {
    fn rows(&self) -> usize {
        self.nrows()
    }
    fn cols(&self) -> usize {
        self.ncols()
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64]) {
        SymmetricOperator::apply_to(self, x, out)
    }
    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.column(j).iter().zip(y).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Final relative residual (`‖Ax − b‖ / ‖b‖` for CG, normal-equation residual for LSQR).
    pub residual: f64,
    /// False when the iteration cap was hit first.
    pub converged: bool,
}

/// Conjugate gradients on an SPD system, warm-started from `x`.
///
/// Stops once `‖Ax − b‖ ≤ tol·‖b‖`. Hitting `maxiter` is reported, not an
/// error; non-finite values and [`STAGNATION_WINDOW`] iterations without
/// progress are.
pub fn cg_solve(
    a: &dyn SymmetricOperator,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    maxiter: usize,
) -> Result<SolveReport> {
    let n = a.dim();
    check_len("cg right-hand side", n, b.len())?;
    check_len("cg iterate", n, x.len())?;
    if !(tol > 0.0) {
        return Err(Error::contract(format!("cg tolerance {tol} must be positive")));
    }
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveReport { iterations: 0, residual: 0.0, converged: true });
    }
    let mut r = vec![0.0; n];
    a.apply_to(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let target = tol * bnorm;
    let (mut best, mut since_best) = (rr.sqrt(), 0);
    for it in 0..maxiter {
        let rnorm = rr.sqrt();
        if !rnorm.is_finite() {
            return Err(Error::Divergence(format!("cg residual became non-finite at iteration {it}")));
        }
        if rnorm <= target {
            return Ok(SolveReport { iterations: it, residual: rnorm / bnorm, converged: true });
        }
        a.apply_to(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !pap.is_finite() || pap <= 0.0 {
            return Err(Error::Divergence(format!(
                "cg curvature pᵗAp = {pap:e} at iteration {it}; system is not positive definite"
            )));
        }
        let alpha = rr / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
        if rr.sqrt() < best {
            best = rr.sqrt();
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= STAGNATION_WINDOW {
                return Err(Error::Stagnation { iterations: it + 1, residual: best / bnorm });
            }
        }
    }
    let rnorm = rr.sqrt();
    if !rnorm.is_finite() {
        return Err(Error::Divergence("cg residual became non-finite".into()));
    }
    Ok(SolveReport {
        iterations: maxiter,
        residual: rnorm / bnorm,
        converged: rnorm <= target,
    })
}

/// LSQR for `min ‖Ax − b‖`, warm-started from `x`.
///
/// Stops once `‖Aᵗ(b − Ax)‖ ≤ tol·‖Aᵗ(b − Ax₀)‖`.
pub fn lsqr_solve(
    a: &dyn LinearMap,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    maxiter: usize,
) -> Result<SolveReport> {
    let (m, n) = (a.rows(), a.cols());
    check_len("lsqr right-hand side", m, b.len())?;
    check_len("lsqr iterate", n, x.len())?;
    if !(tol > 0.0) {
        return Err(Error::contract(format!("lsqr tolerance {tol} must be positive")));
    }
    let mut u = vec![0.0; m];
    a.apply_to(x, &mut u);
    for (ui, bi) in u.iter_mut().zip(b) {
        *ui = bi - *ui;
    }
    let mut beta = norm(&u);
    let mut v = vec![0.0; n];
    let mut alpha = 0.0;
    if beta > 0.0 {
        u.iter_mut().for_each(|t| *t /= beta);
        a.apply_transpose_to(&u, &mut v);
        alpha = norm(&v);
    }
    let initial = alpha * beta;
    if initial == 0.0 {
        return Ok(SolveReport { iterations: 0, residual: 0.0, converged: true });
    }
    v.iter_mut().for_each(|t| *t /= alpha);
    let mut w = v.clone();
    let (mut phi_bar, mut rho_bar) = (beta, alpha);
    let mut av = vec![0.0; m];
    let mut atu = vec![0.0; n];
    let mut residual = 1.0;
    for it in 0..maxiter {
        a.apply_to(&v, &mut av);
        for (ui, avi) in u.iter_mut().zip(&av) {
            *ui = avi - alpha * *ui;
        }
        beta = norm(&u);
        if beta > 0.0 {
            u.iter_mut().for_each(|t| *t /= beta);
            a.apply_transpose_to(&u, &mut atu);
            for (vi, ai) in v.iter_mut().zip(&atu) {
                *vi = ai - beta * *vi;
            }
            alpha = norm(&v);
            if alpha > 0.0 {
                v.iter_mut().for_each(|t| *t /= alpha);
            }
        } else {
            alpha = 0.0;
        }
        let rho = rho_bar.hypot(beta);
        let (c, s) = (rho_bar / rho, beta / rho);
        let theta = s * alpha;
        rho_bar = -c * alpha;
        let phi = c * phi_bar;
        phi_bar *= s;
        axpy(phi / rho, &w, x);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi = vi - (theta / rho) * *wi;
        }
        residual = phi_bar * alpha * c.abs() / initial;
        if !residual.is_finite() || !rho.is_finite() {
            return Err(Error::Divergence(format!("lsqr produced non-finite values at iteration {it}")));
        }
        if residual <= tol || alpha == 0.0 || beta == 0.0 {
            return Ok(SolveReport { iterations: it + 1, residual, converged: true });
        }
    }
    Ok(SolveReport { iterations: maxiter, residual, converged: false })
}

/// `[I + ρDᵗD]⁻¹ b` for the metric fusion operator `D = [T; I]` on `m`
/// nodes, in O(m²) through the incidence matrix.
pub fn metric_inverse_apply(m: usize, rho: f64, b: &[f64]) -> Result<Vec<f64>> {
    check_len("metric inverse", pair_count(m), b.len())?;
    if !(rho >= 0.0) {
        return Err(Error::contract(format!("penalty {rho} must be nonnegative")));
    }
    let mf = m as f64;
    let a = 1.0 / (3.0 * (mf - 1.0) * rho + 1.0);
    let bb = 1.0 / ((2.0 * mf - 1.0) * rho + 1.0);
    let c = 1.0 / ((mf - 1.0) * rho + 1.0);
    let mtb = incidence_apply_transpose(m, b)?;
    let mmtb = incidence_apply(m, &mtb)?;
    let total: f64 = b.iter().sum();
    let shift = 4.0 * a * bb * c * rho * rho * total;
    Ok(b.iter()
        .zip(&mmtb)
        .map(|(bi, qi)| a * bi + a * bb * rho * qi + shift)
        .collect())
}

/// `[I + ρDᵗD]⁻¹ b` for the condition-number operator with `p` values and bound `c`.
pub fn condnum_inverse_apply(p: usize, c: f64, rho: f64, b: &[f64]) -> Result<Vec<f64>> {
    check_len("condnum inverse", p, b.len())?;
    if !(c >= 1.0) || !(rho >= 0.0) {
        return Err(Error::contract(format!("need c >= 1 and rho >= 0, got c = {c}, rho = {rho}")));
    }
    let pf = p as f64;
    let a = 1.0 + rho * pf * (c * c + 1.0);
    let bp = 2.0 * rho * c;
    // (aI - b'11ᵗ)⁻¹ = (1/a)[I + b'/(a - p b') 11ᵗ]; a - p b' = 1 + ρp(c-1)² > 0
    let coef = bp / (a - pf * bp);
    let total: f64 = b.iter().sum();
    Ok(b.iter().map(|bi| (bi + coef * total) / a).collect())
}
