use super::{FusionOperator, OperatorKind};
use crate::parallel::{self, Parallelism};

/// Anisotropic total-variation differences of an `m × p` image stored
/// column-major as `u = vec(U)`.
///
/// Output layout: the `(m-1) × p` forward differences down each column
/// (`U[r+1,c] - U[r,c]`), then the `m × (p-1)` forward differences along
/// each row (`U[r,c+1] - U[r,c]`), both column-major, then one extra row
/// returning the last pixel. The extra row makes `DᵗD` nonsingular.
#[derive(Clone, Debug)]
pub struct TvOperator {
    m: usize,
    p: usize,
}

impl TvOperator {
    pub fn new(m: usize, p: usize) -> Self {
        Self { m, p }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.p)
    }

    fn vertical_len(&self) -> usize {
        self.m.saturating_sub(1) * self.p
    }

    fn horizontal_len(&self) -> usize {
        self.m * self.p.saturating_sub(1)
    }

    /// Number of difference rows (everything except the appended row).
    pub fn difference_rows(&self) -> usize {
        self.vertical_len() + self.horizontal_len()
    }
}

impl FusionOperator for TvOperator {
    fn rows(&self) -> usize {
        self.difference_rows() + 1
    }
    fn cols(&self) -> usize {
        self.m * self.p
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Tv
    }

    fn apply_to(&self, x: &[f64], out: &mut [f64], par: Parallelism) {
        let (m, nv, nd) = (self.m, self.vertical_len(), self.difference_rows());
        let last = x.len() - 1;
        parallel::fill_indexed(out, par, |k| {
            if k < nv {
                let (r, c) = (k % (m - 1), k / (m - 1));
                x[r + 1 + c * m] - x[r + c * m]
            } else if k < nd {
                let idx = k - nv;
                x[idx + m] - x[idx]
            } else {
                x[last]
            }
        });
    }

    fn apply_transpose_to(&self, y: &[f64], out: &mut [f64], par: Parallelism) {
        let (m, p, nv, nd) = (self.m, self.p, self.vertical_len(), self.difference_rows());
        let last = out.len() - 1;
        parallel::fill_indexed(out, par, |idx| {
            let (r, c) = (idx % m, idx / m);
            let mut acc = 0.0;
            if r + 1 < m {
                acc -= y[r + c * (m - 1)];
            }
            if r > 0 {
                acc += y[r - 1 + c * (m - 1)];
            }
            if c + 1 < p {
                acc -= y[nv + idx];
            }
            if c > 0 {
                acc += y[nv + idx - m];
            }
            if idx == last {
                acc += y[nd];
            }
            acc
        });
    }
}
