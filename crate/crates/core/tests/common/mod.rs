#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// Index of the pair `{a, b}` (a ≠ b) in column-major strict lower order,
/// computed by enumeration.
pub fn pair_position(m: usize, a: usize, b: usize) -> usize {
    let (i, j) = if a > b { (a, b) } else { (b, a) };
    let mut k = 0;
    for jj in 0..m {
        for ii in jj + 1..m {
            if (ii, jj) == (i, j) {
                return k;
            }
            k += 1;
        }
    }
    unreachable!()
}

/// Triangle-inequality matrix from its definition: one row per
/// (triple, distinguished edge), `+1` on that edge and `−1` on the other two.
pub fn dense_triangle(m: usize) -> DMatrix<f64> {
    let mut rows = Vec::new();
    for j in 0..m {
        for k in j + 1..m {
            for i in k + 1..m {
                let e = [pair_position(m, i, j), pair_position(m, i, k), pair_position(m, k, j)];
                for lead in 0..3 {
                    let mut r = vec![0.0; m * (m - 1) / 2];
                    for (t, &col) in e.iter().enumerate() {
                        r[col] = if t == lead { 1.0 } else { -1.0 };
                    }
                    rows.push(r);
                }
            }
        }
    }
    let n = m * (m - 1) / 2;
    DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c])
}

/// Unsigned complete-graph incidence matrix `M`: one row `e_i + e_j` per pair.
pub fn dense_incidence(m: usize) -> DMatrix<f64> {
    let n = m * (m - 1) / 2;
    let mut a = DMatrix::zeros(n, m);
    for j in 0..m {
        for i in j + 1..m {
            let r = pair_position(m, i, j);
            a[(r, i)] = 1.0;
            a[(r, j)] = 1.0;
        }
    }
    a
}

/// ℓ1-ball projection by sorting all magnitudes.
pub fn l1_sort_oracle(v: &[f64], gamma: f64) -> Vec<f64> {
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= gamma {
        return v.to_vec();
    }
    let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    let mut cum = 0.0;
    let mut lambda = 0.0;
    for (r, &ar) in a.iter().enumerate() {
        cum += ar;
        let cand = (cum - gamma) / (r + 1) as f64;
        if ar > cand {
            lambda = cand;
        }
    }
    v.iter().map(|x| x.signum() * (x.abs() - lambda).max(0.0)).collect()
}

/// Smallest distance from `v` to a vector keeping exactly `k` of its
/// `blocks`, by enumerating every support.
pub fn sparsity_brute_distance(v: &[f64], block: usize, k: usize) -> f64 {
    let blocks = v.len() / block;
    let norms: Vec<f64> = v.chunks(block).map(|c| c.iter().map(|x| x * x).sum()).collect();
    let total: f64 = norms.iter().sum();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << blocks) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let kept: f64 = (0..blocks).filter(|b| mask >> b & 1 == 1).map(|b| norms[b]).sum();
        best = best.min((total - kept).max(0.0));
    }
    best.sqrt()
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = xp[i];
            xp[i] = orig + h;
            let up = f(&xp);
            xp[i] = orig - h;
            let down = f(&xp);
            xp[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}
