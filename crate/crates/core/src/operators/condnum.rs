use super::{FusionOperator, OperatorKind};
use crate::error::{Error, Result};
use crate::parallel::{self, Parallelism};

/// Condition-number fusion map on `p` singular values: one row per ordered
/// pair `(i, j)`, including `i = j`, at row `k = i + j·p`, with
/// `(Dx)_k = x_i - c·x_j`. `Dx ≤ 0` bounds `max x / min x` by `c`.
#[derive(Clone, Debug)]
pub struct CondnumOperator {
    p: usize,
    c: f64,
}

impl CondnumOperator {
    pub fn new(p: usize, c: f64) -> Result<Self> {
        if !(c >= 1.0) || !c.is_finite() {
            return Err(Error::contract(format!("condition bound c = {c} must be finite and >= 1")));
        }
        Ok(Self { p, c })
    }

    pub fn bound(&self) -> f64 {
        self.c
    }

    pub fn size(&self) -> usize {
        self.p
    }
}

impl FusionOperator for CondnumOperator {
    fn rows(&self) -> usize {
        self.p * self.p
    }
    fn cols(&self) -> usize {
        self.p
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Condnum
    }

    fn apply_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        let (p, c) = (self.p, self.c);
        parallel::fill_indexed(out, par, |k| x[k % p] - c * x[k / p]);
    }

    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64], par: Parallelism) {
        let (p, c) = (self.p, self.c);
        // column l collects +y over rows with i = l and -c·y over rows with j = l
        parallel::fill_indexed(out, par, |l| {
            let as_first: f64 = (0..p).map(|j| y[l + j * p]).sum();
            let as_second: f64 = y[l * p..(l + 1) * p].iter().sum();
            as_first - c * as_second
        });
    }

    fn apply_gram_to(&self, x: &[f64], out: &mut [f64], _par: Parallelism) {
        // DᵗD = p(c² + 1) I - 2c 11ᵗ
        let (p, c) = (self.p as f64, self.c);
        let total: f64 = x.iter().sum();
        for (o, xi) in out.iter_mut().zip(x) {
            *o = p * (c * c + 1.0) * xi - 2.0 * c * total;
        }
    }
}
