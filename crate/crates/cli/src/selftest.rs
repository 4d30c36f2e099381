//! Quick invariant checks on random instances, for verifying an install.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proxdist::engine::{evaluate, mm_step, sd_step, surrogate_g, ProblemKind, SolverState};
use proxdist::linalg::{dist, dot, norm};
use proxdist::linsolve::{condnum_inverse_apply, metric_inverse_apply};
use proxdist::operators::*;
use proxdist::problems::{self, synthetic};
use proxdist::projections::project_l1_ball;
use proxdist::{Algorithm, ConstraintSet, FusionOperator, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn gauss(n: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    dist(a, b) / norm(b).max(f64::MIN_POSITIVE)
}

fn operators(r: &mut ChaCha8Rng) -> Vec<Arc<dyn FusionOperator>> {
    let pairs: Vec<(usize, usize, f64)> = (0..6).flat_map(|j| (j + 1..6).map(move |i| (i, j, 1.0 + (i * j) as f64))).collect();
    vec![
        Arc::new(TriangleOperator::new(6)),
        Arc::new(ClusteringOperator::new(2, 6, pairs).expect("valid pairs")),
        Arc::new(TvOperator::new(5, 7)),
        Arc::new(CondnumOperator::new(6, 3.0).expect("c ≥ 1")),
        Arc::new(DenseOperator::new(DMatrix::from_vec(7, 4, gauss(28, r)))),
    ]
}

fn adjoint(r: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    for op in operators(r) {
        let x = gauss(op.cols(), r);
        let y = gauss(op.rows(), r);
        let lhs = dot(&op.apply(&x).unwrap(), &y);
        let rhs = dot(&x, &op.apply_transpose(&y).unwrap());
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        let gram = op.apply_gram(&x).unwrap();
        worst = worst.max(rel(&gram, &op.apply_transpose(&op.apply(&x).unwrap()).unwrap()));
    }
    Check { name: "operator adjoints and grams", passed: worst <= 1e-12, detail: format!("max error {worst:.2e}") }
}

fn projections(r: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    for n in [1, 2, 10, 200] {
        let v: Vec<f64> = gauss(n, r).iter().map(|x| 3.0 * x).collect();
        // sort-based reference
        let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        let gamma = 1.5;
        let (mut cum, mut lambda) = (0.0, 0.0);
        for (k, &ak) in a.iter().enumerate() {
            cum += ak;
            let t = (cum - gamma) / (k + 1) as f64;
            if ak > t {
                lambda = t;
            }
        }
        let expect: Vec<f64> = if a.iter().sum::<f64>() <= gamma {
            v.clone()
        } else {
            v.iter().map(|x| x.signum() * (x.abs() - lambda).max(0.0)).collect()
        };
        worst = worst.max(rel(&project_l1_ball(&v, gamma).unwrap(), &expect));
        for set in [ConstraintSet::NonNeg(n), ConstraintSet::Sparsity { dim: n, k: n / 2 }] {
            let p = set.project(&v).unwrap();
            if set.project(&p).unwrap() != p {
                worst = f64::INFINITY;
            }
        }
    }
    Check { name: "projections", passed: worst <= 1e-12, detail: format!("max error {worst:.2e}") }
}

fn inverses(r: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    for rho in [0.1, 1.0, 10.0, 1e3] {
        let m = 6;
        let t = TriangleOperator::new(m).materialize_dense().unwrap();
        let n = t.ncols();
        let lhs = DMatrix::identity(n, n) * (1.0 + rho) + t.transpose() * &t * rho;
        let b = gauss(n, r);
        let dense = lhs.lu().solve(&DVector::from_vec(b.clone())).unwrap();
        worst = worst.max(rel(&metric_inverse_apply(m, rho, &b).unwrap(), dense.as_slice()));
        let d = CondnumOperator::new(5, 2.5).unwrap().materialize_dense().unwrap();
        let lhs = DMatrix::identity(5, 5) + d.transpose() * &d * rho;
        let b = gauss(5, r);
        let dense = lhs.lu().solve(&DVector::from_vec(b.clone())).unwrap();
        worst = worst.max(rel(&condnum_inverse_apply(5, 2.5, rho, &b).unwrap(), dense.as_slice()));
    }
    Check { name: "closed-form inverses", passed: worst <= 1e-9, detail: format!("max error {worst:.2e}") }
}

fn descent(r: &mut ChaCha8Rng) -> Check {
    let y = synthetic::uniform_dissimilarities(6, r);
    let p = problems::build_metric(&y, None).unwrap();
    let mut failures = 0;
    let mut checks = 0;
    for _ in 0..20 {
        let rho = 10f64.powf(r.random_range(-1.0..3.0));
        let x: Vec<f64> = p.start.iter().zip(gauss(p.dim(), r)).map(|(a, b)| a + b).collect();
        let h = evaluate(&p, &x, rho, Default::default()).unwrap().objective;
        let xp: Vec<f64> = x.iter().zip(gauss(p.dim(), r)).map(|(a, b)| a + b).collect();
        let hp = evaluate(&p, &xp, rho, Default::default()).unwrap().objective;
        checks += 2;
        if (surrogate_g(&p, &x, &x, rho).unwrap() - h).abs() > 1e-12 * (1.0 + h.abs()) {
            failures += 1;
        }
        if surrogate_g(&p, &xp, &x, rho).unwrap() < hp - 1e-12 * (1.0 + hp.abs()) {
            failures += 1;
        }
        for alg in [Algorithm::Mm, Algorithm::SteepestDescent] {
            let mut cfg = SolverConfig::for_problem(ProblemKind::Metric, alg);
            cfg.accelerate = false;
            let mut s = SolverState::new(&p, &x, 1.0).unwrap();
            let step = if alg == Algorithm::Mm { mm_step } else { sd_step };
            if step(&p, &mut s, rho, &cfg).is_err() {
                failures += 1;
                continue;
            }
            let hn = evaluate(&p, &s.x, rho, Default::default()).unwrap().objective;
            checks += 1;
            if hn > h + 1e-10 * (1.0 + h.abs()) {
                failures += 1;
            }
        }
    }
    Check { name: "majorization and descent", passed: failures == 0, detail: format!("{failures} of {checks} failed") }
}

pub fn run(seed: u64) -> Vec<Check> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    vec![adjoint(&mut r), projections(&mut r), inverses(&mut r), descent(&mut r)]
}
