//! Execution policy for the data-parallel kernels.
//!
//! Kernels fall back to a plain loop when the `parallel` feature is off or
//! the output is shorter than [`PAR_THRESHOLD`].

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Outputs shorter than this are always filled sequentially.
pub const PAR_THRESHOLD: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Rayon
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    /// Whether work of the given size actually goes to the thread pool.
    pub fn engages(self, len: usize) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Rayon && len >= PAR_THRESHOLD
    }
}

/// `out[i] = f(i)` for every index.
pub(crate) fn fill_indexed<F>(out: &mut [f64], par: Parallelism, f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.engages(out.len()) {
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
        return;
    }
    let _ = par;
    for (i, o) in out.iter_mut().enumerate() {
        *o = f(i);
    }
}

/// Runs `f(chunk_index, chunk)` over consecutive chunks of `chunk_len`.
pub(crate) fn for_each_chunk<F>(out: &mut [f64], chunk_len: usize, par: Parallelism, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    if chunk_len == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if par.engages(out.len()) {
        out.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = par;
    for (i, c) in out.chunks_mut(chunk_len).enumerate() {
        f(i, c);
    }
}

/// Runs `f(segment_index, segment)` over disjoint variable-length segments.
/// `bounds` holds `segments + 1` monotone offsets into `out`.
pub(crate) fn for_each_segment<F>(out: &mut [f64], bounds: &[usize], par: Parallelism, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let mut segments = Vec::with_capacity(bounds.len().saturating_sub(1));
    let mut rest = out;
    for w in bounds.windows(2) {
        let (head, tail) = rest.split_at_mut(w[1] - w[0]);
        segments.push(head);
        rest = tail;
    }
    #[cfg(feature = "parallel")]
    if par.engages(bounds.last().copied().unwrap_or(0)) {
        segments
            .into_par_iter()
            .enumerate()
            .for_each(|(i, s)| f(i, s));
        return;
    }
    let _ = par;
    for (i, s) in segments.into_iter().enumerate() {
        f(i, s);
    }
}

/// Parallel map over an index range, collecting in order.
pub fn map_range<T, F>(n: usize, par: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par == Parallelism::Rayon {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = par;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_fill_agree() {
        let n = PAR_THRESHOLD * 3 + 7;
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        fill_indexed(&mut a, Parallelism::Sequential, |i| (i as f64).sin());
        fill_indexed(&mut b, Parallelism::Rayon, |i| (i as f64).sin());
        assert_eq!(a, b);
    }

    #[test]
    fn segments_cover_output() {
        let bounds = [0, 3, 3, 10, 20];
        let mut out = vec![0.0; 20];
        for_each_segment(&mut out, &bounds, Parallelism::Rayon, |i, s| {
            s.iter_mut().for_each(|v| *v = i as f64)
        });
        assert_eq!(out[0..3], [0.0; 3]);
        assert_eq!(out[3..10], [2.0; 7]);
        assert_eq!(out[10..20], [3.0; 10]);
    }
}
