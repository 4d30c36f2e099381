//! Clustering agreement indices and image-quality measures.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{check_len, Error, Result};

/// Contingency table of two labelings: nonzero cells `(row, col, count)`,
/// row sums and column sums.
/// Nonzero cells `(i, j, n_ij)` with row and column sums.
type Table = (Vec<(usize, usize, f64)>, Vec<f64>, Vec<f64>);

fn contingency<A: Eq + Hash, B: Eq + Hash>(a: &[A], b: &[B]) -> Table {
    let mut ra: HashMap<&A, usize> = HashMap::new();
    let mut rb: HashMap<&B, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), usize> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        let na = ra.len();
        let i = *ra.entry(x).or_insert(na);
        let nb = rb.len();
        let j = *rb.entry(y).or_insert(nb);
        *cells.entry((i, j)).or_default() += 1;
    }
    let mut rows = vec![0.0; ra.len()];
    let mut cols = vec![0.0; rb.len()];
    let mut out: Vec<_> = cells.into_iter().map(|((i, j), c)| (i, j, c as f64)).collect();
    out.sort_unstable_by_key(|&(i, j, _)| (i, j));
    for &(i, j, c) in &out {
        rows[i] += c;
        cols[j] += c;
    }
    (out, rows, cols)
}

fn choose2(n: f64) -> f64 {
    n * (n - 1.0) / 2.0
}

/// Adjusted Rand index. Returns 1 when the expected and maximal indices
/// coincide and the partitions agree, 0 when they coincide otherwise.
pub fn adjusted_rand_index<A: Eq + Hash, B: Eq + Hash>(a: &[A], b: &[B]) -> Result<f64> {
    check_len("adjusted rand index labels", a.len(), b.len())?;
    let (cells, rows, cols) = contingency(a, b);
    let n = a.len() as f64;
    let index: f64 = cells.iter().map(|&(_, _, c)| choose2(c)).sum();
    let sa: f64 = rows.iter().map(|&c| choose2(c)).sum();
    let sb: f64 = cols.iter().map(|&c| choose2(c)).sum();
    let total = choose2(n);
    let expected = if total > 0.0 { sa * sb / total } else { 0.0 };
    let max = 0.5 * (sa + sb);
    let denom = max - expected;
    if denom == 0.0 {
        let same = cells.len() == rows.len() && cells.len() == cols.len();
        return Ok(if same { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / denom)
}

/// Mutual information normalized by `sqrt(H(a)·H(b))`, clamped to `[0, 1]`.
pub fn normalized_mutual_information<A: Eq + Hash, B: Eq + Hash>(a: &[A], b: &[B]) -> Result<f64> {
    check_len("mutual information labels", a.len(), b.len())?;
    if a.is_empty() {
        return Ok(1.0);
    }
    let (cells, rows, cols) = contingency(a, b);
    let n = a.len() as f64;
    let entropy = |v: &[f64]| -> f64 { -v.iter().map(|&c| (c / n) * (c / n).ln()).sum::<f64>() };
    let (ha, hb) = (entropy(&rows), entropy(&cols));
    let same = cells.len() == rows.len() && cells.len() == cols.len();
    if ha == 0.0 || hb == 0.0 {
        return Ok(if same { 1.0 } else { 0.0 });
    }
    let mi: f64 = cells
        .iter()
        .map(|&(i, j, c)| (c / n) * ((n * c) / (rows[i] * cols[j])).ln())
        .sum();
    Ok((mi / (ha * hb).sqrt()).clamp(0.0, 1.0))
}

pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len("mse", a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::contract("mse of empty images"));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64)
}

/// `10·log10(peak² / MSE)`; `+∞` for identical images.
pub fn psnr(a: &[f64], b: &[f64], peak: f64) -> Result<f64> {
    if !(peak > 0.0) {
        return Err(Error::contract(format!("psnr peak {peak} must be positive")));
    }
    let e = mse(a, b)?;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / e).log10())
}
