//! Euclidean projections onto the constraint sets `S` and the proximal map
//! of the scaled squared distance.

use std::cmp::Ordering;

use crate::error::{check_len, Error, Result};
use crate::linalg;

/// A closed set with a computable Euclidean projection.
///
/// Sparsity sets are nonconvex; their projection picks one nearest point,
/// keeping the lower index when magnitudes tie.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintSet {
    /// The whole space; projection is the identity.
    Free(usize),
    NonNeg(usize),
    NonPos(usize),
    /// `{v : ‖v‖₁ ≤ radius}`.
    L1Ball { dim: usize, radius: f64 },
    /// Vectors with at most `k` nonzero entries.
    Sparsity { dim: usize, k: usize },
    /// `blocks` consecutive blocks of length `block`, at most `k` of them nonzero.
    ColumnSparsity { block: usize, blocks: usize, k: usize },
    /// Cartesian product; block extents follow each factor's dimension.
    Product(Vec<ConstraintSet>),
}

impl ConstraintSet {
    pub fn dim(&self) -> usize {
        match self {
            ConstraintSet::Free(n) | ConstraintSet::NonNeg(n) | ConstraintSet::NonPos(n) => *n,
            ConstraintSet::L1Ball { dim, .. } | ConstraintSet::Sparsity { dim, .. } => *dim,
            ConstraintSet::ColumnSparsity { block, blocks, .. } => block * blocks,
            ConstraintSet::Product(parts) => parts.iter().map(ConstraintSet::dim).sum(),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            ConstraintSet::Sparsity { dim, k } => k >= dim,
            ConstraintSet::ColumnSparsity { blocks, k, .. } => k >= blocks,
            ConstraintSet::Product(parts) => parts.iter().all(ConstraintSet::is_convex),
            _ => true,
        }
    }

    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; v.len()];
        self.project_into(v, &mut out)?;
        Ok(out)
    }

    /// Writes `P(v)` into `out`.
    pub fn project_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("projection input", self.dim(), v.len())?;
        check_len("projection output", v.len(), out.len())?;
        match self {
            ConstraintSet::Free(_) => out.copy_from_slice(v),
            ConstraintSet::NonNeg(_) => {
                for (o, x) in out.iter_mut().zip(v) {
                    *o = x.max(0.0);
                }
            }
            ConstraintSet::NonPos(_) => {
                for (o, x) in out.iter_mut().zip(v) {
                    *o = x.min(0.0);
                }
            }
            ConstraintSet::L1Ball { radius, .. } => project_l1_ball_into(v, *radius, out)?,
            ConstraintSet::Sparsity { k, .. } => project_column_sparsity_into(v, 1, *k, out)?,
            ConstraintSet::ColumnSparsity { block, k, .. } => {
                project_column_sparsity_into(v, *block, *k, out)?
            }
            ConstraintSet::Product(parts) => {
                let mut start = 0;
                for part in parts {
                    let end = start + part.dim();
                    part.project_into(&v[start..end], &mut out[start..end])?;
                    start = end;
                }
            }
        }
        Ok(())
    }

    /// `dist(v, S)`.
    pub fn distance(&self, v: &[f64]) -> Result<f64> {
        Ok(linalg::dist(v, &self.project(v)?))
    }
}

/// Projection onto `{v : ‖v‖₁ ≤ γ}`.
pub fn project_l1_ball(v: &[f64], gamma: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; v.len()];
    project_l1_ball_into(v, gamma, &mut out)?;
    Ok(out)
}

fn project_l1_ball_into(v: &[f64], gamma: f64, out: &mut [f64]) -> Result<()> {
    if !(gamma >= 0.0) {
        return Err(Error::contract(format!("l1 radius {gamma} must be nonnegative")));
    }
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= gamma {
        out.copy_from_slice(v);
        return Ok(());
    }
    if gamma == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return Ok(());
    }
    let lambda = l1_threshold(v, gamma);
    for (o, x) in out.iter_mut().zip(v) {
        *o = x.signum() * (x.abs() - lambda).max(0.0);
    }
    Ok(())
}

/// Root `λ` of `Σ(|v_i| − λ)_+ = γ` by randomized pivoting, expected O(n).
/// Requires `‖v‖₁ > γ > 0`.
fn l1_threshold(v: &[f64], gamma: f64) -> f64 {
    let mut buf: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    // xorshift; fixed seed keeps the projection deterministic
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ buf.len() as u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let (mut lo, mut hi) = (0, buf.len());
    let (mut sum, mut count) = (0.0, 0usize);
    while lo < hi {
        let pick = lo + (next() % (hi - lo) as u64) as usize;
        buf.swap(lo, pick);
        let pivot = buf[lo];
        // move entries >= pivot to the front of (lo+1..hi)
        let mut split = lo + 1;
        let mut above = pivot;
        for t in lo + 1..hi {
            if buf[t] >= pivot {
                above += buf[t];
                buf.swap(t, split);
                split += 1;
            }
        }
        let n_above = split - lo;
        if sum + above - (count + n_above) as f64 * pivot < gamma {
            sum += above;
            count += n_above;
            lo = split;
        } else {
            hi = split;
            lo += 1;
        }
    }
    (sum - gamma) / count as f64
}

/// Keeps the `k` blocks of length `block` with the largest Euclidean norms
/// and zeroes the rest. Ties keep the lower block index.
pub fn project_column_sparsity(v: &[f64], block: usize, k: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; v.len()];
    project_column_sparsity_into(v, block, k, &mut out)?;
    Ok(out)
}

fn project_column_sparsity_into(v: &[f64], block: usize, k: usize, out: &mut [f64]) -> Result<()> {
    if block == 0 {
        out.copy_from_slice(v);
        return Ok(());
    }
    if !v.len().is_multiple_of(block) {
        return Err(Error::contract(format!(
            "length {} is not a multiple of the block size {block}",
            v.len()
        )));
    }
    let blocks = v.len() / block;
    if k > blocks {
        return Err(Error::contract(format!("sparsity level {k} exceeds {blocks} blocks")));
    }
    if k == blocks {
        out.copy_from_slice(v);
        return Ok(());
    }
    out.iter_mut().for_each(|o| *o = 0.0);
    if k == 0 {
        return Ok(());
    }
    let norms: Vec<f64> = v.chunks(block).map(linalg::norm_sq).collect();
    let mut order: Vec<usize> = (0..blocks).collect();
    let rank = |a: &usize, b: &usize| -> Ordering {
        norms[*b].total_cmp(&norms[*a]).then(a.cmp(b))
    };
    order.select_nth_unstable_by(k - 1, rank);
    for &c in &order[..k] {
        let r = c * block..(c + 1) * block;
        out[r.clone()].copy_from_slice(&v[r]);
    }
    Ok(())
}

/// Proximal map of `α · ½ dist(·, S)²`: `α/(1+α) P(z) + 1/(1+α) z`.
pub fn prox_scaled_distance(z: &[f64], alpha: f64, set: &ConstraintSet) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::contract(format!("prox scale {alpha} must be positive")));
    }
    let mut out = set.project(z)?;
    let (a, b) = (alpha / (1.0 + alpha), 1.0 / (1.0 + alpha));
    for (o, x) in out.iter_mut().zip(z) {
        *o = a * *o + b * x;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthants() {
        assert_eq!(ConstraintSet::NonNeg(2).project(&[-1.0, 2.0]).unwrap(), vec![0.0, 2.0]);
        assert_eq!(ConstraintSet::NonPos(2).project(&[-1.0, 2.0]).unwrap(), vec![-1.0, 0.0]);
    }

    #[test]
    fn l1_examples() {
        assert_eq!(project_l1_ball(&[3.0, -1.0], 2.0).unwrap(), vec![2.0, 0.0]);
        assert_eq!(project_l1_ball(&[0.5, -0.5], 2.0).unwrap(), vec![0.5, -0.5]);
        let p = project_l1_ball(&[1.0, 1.0, 1.0], 1.5).unwrap();
        assert!(p.iter().all(|x| (x - 0.5).abs() < 1e-15));
        assert_eq!(project_l1_ball(&[1.0, -2.0], 0.0).unwrap(), vec![0.0, 0.0]);
        assert!(project_l1_ball(&[1.0], -1.0).is_err());
    }

    #[test]
    fn boundary_input_unchanged() {
        let v = [0.25, -0.75, 1.0];
        assert_eq!(project_l1_ball(&v, 2.0).unwrap(), v.to_vec());
    }

    #[test]
    fn sparsity_examples() {
        let s = ConstraintSet::Sparsity { dim: 3, k: 2 };
        assert_eq!(s.project(&[3.0, 1.0, -2.0]).unwrap(), vec![3.0, 0.0, -2.0]);
        assert_eq!(project_column_sparsity(&[3.0, 1.0, -2.0], 1, 2).unwrap(), vec![3.0, 0.0, -2.0]);
        assert_eq!(project_column_sparsity(&[3.0, 1.0, -2.0], 1, 0).unwrap(), vec![0.0; 3]);
        assert!(project_column_sparsity(&[3.0, 1.0], 1, 3).is_err());
    }

    #[test]
    fn ties_keep_lower_index() {
        assert_eq!(project_column_sparsity(&[1.0, -1.0, 1.0], 1, 1).unwrap(), vec![1.0, 0.0, 0.0]);
        let v = [0.0, 1.0, 1.0, 0.0, 0.5, 0.5];
        assert_eq!(project_column_sparsity(&v, 2, 1).unwrap(), vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn prox_examples() {
        let set = ConstraintSet::NonNeg(2);
        assert_eq!(prox_scaled_distance(&[-2.0, 4.0], 1.0, &set).unwrap(), vec![-1.0, 4.0]);
        assert_eq!(prox_scaled_distance(&[2.0, 4.0], 3.0, &set).unwrap(), vec![2.0, 4.0]);
        let far = prox_scaled_distance(&[-2.0, 4.0], 1e3, &set).unwrap();
        assert!(linalg::dist(&far, &[0.0, 4.0]) < 2e-3);
        assert!(prox_scaled_distance(&[1.0, 1.0], 0.0, &set).is_err());
    }

    #[test]
    fn product_dimensions() {
        let s = ConstraintSet::Product(vec![
            ConstraintSet::L1Ball { dim: 3, radius: 1.0 },
            ConstraintSet::Free(1),
        ]);
        assert_eq!(s.dim(), 4);
        assert!(s.is_convex());
        assert_eq!(s.project(&[2.0, 0.0, 0.0, -9.0]).unwrap(), vec![1.0, 0.0, 0.0, -9.0]);
        assert!(s.project(&[1.0]).is_err());
        assert!(!ConstraintSet::Sparsity { dim: 3, k: 1 }.is_convex());
    }
}
