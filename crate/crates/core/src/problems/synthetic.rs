//! Seeded synthetic instances for tests, benches and the command line.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

/// Symmetric dissimilarities with off-diagonal entries uniform on `[0, 10]`.
pub fn uniform_dissimilarities<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let dist = Uniform::new_inclusive(0.0, 10.0).expect("valid range");
    let mut y = DMatrix::zeros(m, m);
    for j in 0..m {
        for i in j + 1..m {
            let v = dist.sample(rng);
            y[(i, j)] = v;
            y[(j, i)] = v;
        }
    }
    y
}

/// Predictors uniform on `[−1, 1]^d` (columns) and responses `‖x‖² + ε`
/// with `ε ~ N(0, noise_var)`.
pub fn cvxreg_data<R: Rng + ?Sized>(m: usize, d: usize, noise_var: f64, rng: &mut R) -> (DMatrix<f64>, Vec<f64>) {
    let unif = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    let noise = Normal::new(0.0, noise_var.sqrt()).expect("finite variance");
    let x = DMatrix::from_fn(d, m, |_, _| unif.sample(rng));
    let y = (0..m).map(|j| x.column(j).norm_squared() + noise.sample(rng)).collect();
    (x, y)
}

/// Isotropic Gaussian blobs in the plane: `sizes[c]` points around
/// `means[c]` with standard deviation `sigma`. Returns `2 × m` data and labels.
pub fn gaussian_clusters<R: Rng + ?Sized>(
    sizes: &[usize],
    means: &[(f64, f64)],
    sigma: f64,
    rng: &mut R,
) -> (DMatrix<f64>, Vec<usize>) {
    let noise = Normal::new(0.0, sigma).expect("finite sigma");
    let m: usize = sizes.iter().sum();
    let mut x = DMatrix::zeros(2, m);
    let mut labels = Vec::with_capacity(m);
    let mut col = 0;
    for (c, (&n, &(mx, my))) in sizes.iter().zip(means).enumerate() {
        for _ in 0..n {
            x[(0, col)] = mx + noise.sample(rng);
            x[(1, col)] = my + noise.sample(rng);
            labels.push(c);
            col += 1;
        }
    }
    (x, labels)
}

/// Two interleaved noisy spiral arms with `m` points in total.
pub fn spirals<R: Rng + ?Sized>(m: usize, noise_sd: f64, rng: &mut R) -> (DMatrix<f64>, Vec<usize>) {
    let noise = Normal::new(0.0, noise_sd).expect("finite sigma");
    let mut x = DMatrix::zeros(2, m);
    let mut labels = Vec::with_capacity(m);
    for i in 0..m {
        let arm = i % 2;
        let t = 0.5 + 3.0 * PI * (i / 2) as f64 / (m / 2).max(1) as f64;
        let phase = arm as f64 * PI;
        x[(0, i)] = t * (t + phase).cos() / 10.0 + noise.sample(rng);
        x[(1, i)] = t * (t + phase).sin() / 10.0 + noise.sample(rng);
        labels.push(arm);
    }
    (x, labels)
}

/// Piecewise-constant test image in `[0, 1]`: a bright rectangle and a
/// darker square on a mid-grey background.
pub fn piecewise_image(m: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, p, |r, c| {
        let (fr, fc) = (r as f64 / m as f64, c as f64 / p as f64);
        if (0.15..0.55).contains(&fr) && (0.1..0.45).contains(&fc) {
            0.9
        } else if (0.6..0.9).contains(&fr) && (0.55..0.85).contains(&fc) {
            0.1
        } else {
            0.5
        }
    })
}

/// Adds `N(0, sd²)` noise to every pixel.
pub fn add_noise<R: Rng + ?Sized>(image: &DMatrix<f64>, sd: f64, rng: &mut R) -> DMatrix<f64> {
    let noise = Normal::new(0.0, sd).expect("finite sigma");
    image.map(|v| v + noise.sample(rng))
}

/// Descending singular values with `σ_1 = kappa`, `σ_p = 1` and the rest
/// uniform in between.
pub fn singular_values_with_condition<R: Rng + ?Sized>(p: usize, kappa: f64, rng: &mut R) -> Vec<f64> {
    let unif = Uniform::new_inclusive(1.0, kappa).expect("kappa >= 1");
    let mut s: Vec<f64> = (0..p).map(|_| unif.sample(rng)).collect();
    if p >= 1 {
        s[0] = kappa;
    }
    if p >= 2 {
        s[p - 1] = 1.0;
    }
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
