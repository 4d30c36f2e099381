//! One function per subcommand: load or synthesize data, solve, and package
//! the results for [`crate::output`].

use std::time::Instant;

use nalgebra::DMatrix;
use proxdist::engine::{run_annealing, ProblemKind, RunResult, RunTrace, StopReason, TraceRow};
use proxdist::problems::{self, synthetic};
use proxdist::{metrics, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;
use crate::io::{self, Pgm};

/// Everything one run produces.
pub struct Outcome {
    pub summary: Summary,
    pub trace: RunTrace,
    pub output: Output,
}

pub enum Output {
    Matrix(DMatrix<f64>),
    Text(String),
    Image(Pgm),
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub problem: &'static str,
    pub seed: u64,
    pub loss: f64,
    pub distance: f64,
    pub objective: f64,
    pub grad_norm: f64,
    pub rho: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub linear_iterations: usize,
    pub stop: StopReason,
    pub converged: bool,
    pub wall_time_s: f64,
    pub config: SolverConfig,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Summary {
    fn new(problem: &'static str, seed: u64, cfg: &SolverConfig, res: &RunResult, start: Instant) -> Self {
        Summary {
            schema: 1,
            problem,
            seed,
            loss: res.loss,
            distance: res.distance,
            objective: res.objective,
            grad_norm: res.grad_norm,
            rho: res.rho,
            outer_iterations: res.outer_iterations,
            inner_iterations: res.inner_iterations,
            linear_iterations: res.linear_iterations,
            stop: res.stop,
            converged: res.converged(),
            wall_time_s: start.elapsed().as_secs_f64(),
            config: cfg.clone(),
            details: Value::Null,
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn solve(problem: &proxdist::ProblemInstance, cfg: &SolverConfig) -> Result<RunResult, CliError> {
    Ok(run_annealing(problem, cfg)?)
}

pub fn metric(a: &MetricArgs, seed: u64) -> Result<Outcome, CliError> {
    let cfg = a.solver.config(ProblemKind::Metric)?;
    let y = match &a.input {
        Some(path) => io::read_matrix_csv(path)?,
        None => {
            if a.m < 3 {
                return Err(CliError::input("--m must be at least 3"));
            }
            synthetic::uniform_dissimilarities(a.m, &mut rng(seed))
        }
    };
    let w = a.weights.as_deref().map(io::read_matrix_csv).transpose()?;
    let problem = problems::build_metric(&y, w.as_ref()).map_err(CliError::build)?;
    let start = Instant::now();
    let res = solve(&problem, &cfg)?;
    let mut summary = Summary::new("metric", seed, &cfg, &res, start);
    summary.details = json!({ "nodes": y.nrows() });
    let solution = problems::untrivec(y.nrows(), &res.x)?;
    Ok(Outcome { summary, trace: res.trace, output: Output::Matrix(solution) })
}

pub fn cvxreg(a: &CvxregArgs, seed: u64) -> Result<Outcome, CliError> {
    let cfg = a.solver.config(ProblemKind::Cvxreg)?;
    let (x, y) = match &a.input {
        Some(path) => {
            let data = io::read_matrix_csv(path)?;
            if data.ncols() < 2 {
                return Err(CliError::input("convex regression data needs predictor columns and a response column"));
            }
            let d = data.ncols() - 1;
            let x = data.columns(0, d).transpose();
            let y = data.column(d).iter().copied().collect::<Vec<_>>();
            (x, y)
        }
        None => {
            if !(a.noise_var >= 0.0) || a.d == 0 {
                return Err(CliError::input("need --d ≥ 1 and --noise-var ≥ 0"));
            }
            synthetic::cvxreg_data(a.m, a.d, a.noise_var, &mut rng(seed))
        }
    };
    let (d, m) = x.shape();
    let problem = problems::build_cvxreg(&x, &y).map_err(CliError::build)?;
    let start = Instant::now();
    let res = solve(&problem, &cfg)?;
    let worst = problem.operator.apply(&res.x)?.into_iter().fold(0.0f64, f64::max);
    let mut summary = Summary::new("cvxreg", seed, &cfg, &res, start);
    summary.details = json!({ "samples": m, "features": d, "max_violation": worst });
    // one row per sample: fitted value, then its subgradient
    let fit = DMatrix::from_fn(m, 1 + d, |i, c| if c == 0 { res.x[i] } else { res.x[m + i * d + c - 1] });
    Ok(Outcome { summary, trace: res.trace, output: Output::Matrix(fit) })
}

pub fn cluster(a: &ClusterArgs, seed: u64) -> Result<Outcome, CliError> {
    let cfg = a.solver.config(ProblemKind::Clustering)?;
    let (x, truth) = match (&a.input, a.synthetic) {
        (Some(path), _) => {
            let x = io::read_matrix_csv(path)?.transpose();
            let truth = match &a.labels {
                Some(p) => Some(read_labels(p, x.ncols())?),
                None => None,
            };
            (x, truth)
        }
        (None, Some(kind)) => {
            if a.m < 3 {
                return Err(CliError::input("--m must be at least 3"));
            }
            let (x, t) = match kind {
                ClusterData::Gaussians => {
                    let sizes: Vec<usize> = (0..3).map(|i| a.m / 3 + usize::from(i < a.m % 3)).collect();
                    synthetic::gaussian_clusters(&sizes, &[(0.0, 0.0), (2.0, 2.0), (1.8, 0.5)], 0.1, &mut rng(seed))
                }
                ClusterData::Spirals => synthetic::spirals(a.m, 0.02, &mut rng(seed)),
            };
            (x, Some(t.into_iter().map(|l| l as i64).collect::<Vec<i64>>()))
        }
        (None, None) => return Err(CliError::input("give --input or --synthetic")),
    };
    let w = problems::knn_gaussian_weights(&x, a.knn, a.phi).map_err(CliError::build)?;
    let start = Instant::now();
    let path = problems::cvxclusterpath(&x, &w, a.s0, a.s_step, &cfg).map_err(|e| match e {
        proxdist::Error::Contract(_) | proxdist::Error::DimensionMismatch { .. } => CliError::build(e),
        e => CliError::Solver(e),
    })?;
    let last = path.entries.last().ok_or_else(|| CliError::input("empty cluster path"))?;
    let mut summary = Summary::new("cluster", seed, &cfg, &last.result, start);
    let mut trace = RunTrace::new();
    let results: Vec<&RunResult> = path.entries.iter().map(|e| &e.result).collect();
    accumulate(&mut summary, &mut trace, &results);
    let levels: Vec<Value> = path
        .entries
        .iter()
        .map(|e| {
            let mut v = json!({ "s": e.s, "k": e.k, "clusters": e.clusters, "distance": e.result.distance });
            if let Some(t) = &truth {
                v["ari"] = json!(metrics::adjusted_rand_index(&e.labels, t).unwrap_or(f64::NAN));
                v["nmi"] = json!(metrics::normalized_mutual_information(&e.labels, t).unwrap_or(f64::NAN));
            }
            v
        })
        .collect();
    let best_ari = levels.iter().filter_map(|v| v["ari"].as_f64()).fold(None, |b: Option<f64>, a| Some(b.map_or(a, |b| b.max(a))));
    summary.details = json!({ "samples": x.ncols(), "k_max": path.k_max, "path": levels, "best_ari": best_ari });
    let mut text = String::from("s,k,clusters,labels\n");
    for e in &path.entries {
        let labels: Vec<String> = e.labels.iter().map(|l| l.to_string()).collect();
        text.push_str(&format!("{},{},{},{}\n", e.s, e.k, e.clusters, labels.join(" ")));
    }
    summary.wall_time_s = start.elapsed().as_secs_f64();
    Ok(Outcome { summary, trace, output: Output::Text(text) })
}

fn read_labels(path: &std::path::Path, n: usize) -> Result<Vec<i64>, CliError> {
    let m = io::read_matrix_csv(path)?;
    let labels: Vec<i64> = m.transpose().iter().map(|v| *v as i64).collect();
    if labels.len() != n {
        return Err(CliError::input(format!("{}: {} labels for {n} samples", path.display(), labels.len())));
    }
    Ok(labels)
}

/// Totals iteration counts over a path of solves and concatenates their
/// traces, numbering outer iterations consecutively across the path.
fn accumulate(summary: &mut Summary, trace: &mut RunTrace, results: &[&RunResult]) {
    let (mut outer, mut inner, mut linear) = (0, 0, 0);
    for res in results {
        for r in res.trace.rows() {
            trace.push(TraceRow { outer: outer + r.outer, ..*r });
        }
        outer += res.outer_iterations;
        inner += res.inner_iterations;
        linear += res.linear_iterations;
    }
    summary.outer_iterations = outer;
    summary.inner_iterations = inner;
    summary.linear_iterations = linear;
}

pub fn denoise(a: &DenoiseArgs, seed: u64) -> Result<Outcome, CliError> {
    let cfg = a.solver.config(ProblemKind::Denoise)?;
    let (noisy, reference, maxval) = match &a.input {
        Some(path) => {
            let img = io::read_pgm(path)?;
            let reference = a.reference.as_deref().map(io::read_pgm).transpose()?.map(|r| r.pixels);
            (img.pixels, reference, img.maxval)
        }
        None => {
            if a.rows == 0 || a.cols == 0 || !(a.noise_sd >= 0.0) {
                return Err(CliError::input("need positive --rows, --cols and --noise-sd ≥ 0"));
            }
            let clean = synthetic::piecewise_image(a.rows, a.cols);
            let noisy = synthetic::add_noise(&clean, a.noise_sd, &mut rng(seed));
            (noisy, Some(clean), 255)
        }
    };
    if let Some(r) = &reference {
        if r.shape() != noisy.shape() {
            return Err(CliError::input("reference image has a different size"));
        }
    }
    if a.levels.is_empty() {
        return Err(CliError::input("--levels is empty"));
    }
    let start = Instant::now();
    let path = problems::denoise_path(&noisy, &a.levels, &cfg, reference.as_ref(), a.peak).map_err(|e| match e {
        proxdist::Error::Contract(_) | proxdist::Error::DimensionMismatch { .. } => CliError::build(e),
        e => CliError::Solver(e),
    })?;
    let pick = if reference.is_some() {
        (0..path.len()).max_by(|&i, &j| path[i].psnr.total_cmp(&path[j].psnr)).unwrap_or(0)
    } else {
        path.len() - 1
    };
    let last = &path[path.len() - 1];
    let mut summary = Summary::new("denoise", seed, &cfg, &last.result, start);
    let mut trace = RunTrace::new();
    let results: Vec<&RunResult> = path.iter().map(|l| &l.result).collect();
    accumulate(&mut summary, &mut trace, &results);
    let levels: Vec<Value> = path
        .iter()
        .map(|l| json!({ "s": l.s, "gamma": l.gamma, "tv": l.tv, "mse": l.mse, "psnr": finite_or_null(l.psnr), "distance": l.result.distance }))
        .collect();
    summary.details = json!({
        "rows": noisy.nrows(),
        "cols": noisy.ncols(),
        "levels": levels,
        "selected_level": path[pick].s,
    });
    summary.wall_time_s = start.elapsed().as_secs_f64();
    let pixels = DMatrix::from_column_slice(noisy.nrows(), noisy.ncols(), &path[pick].image);
    Ok(Outcome { summary, trace, output: Output::Image(Pgm { pixels, maxval }) })
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn condnum(a: &CondnumArgs, seed: u64) -> Result<Outcome, CliError> {
    let cfg = a.solver.config(ProblemKind::Condnum)?;
    let sigma = if let Some(path) = &a.sigma {
        let mut s: Vec<f64> = io::read_matrix_csv(path)?.iter().copied().collect();
        s.sort_by(|x, y| y.total_cmp(x));
        s
    } else if let Some(path) = &a.matrix {
        problems::singular_values(&io::read_matrix_csv(path)?).map_err(CliError::build)?
    } else {
        if a.p == 0 || !(a.kappa >= 1.0) {
            return Err(CliError::input("need --p ≥ 1 and --kappa ≥ 1"));
        }
        synthetic::singular_values_with_condition(a.p, a.kappa, &mut rng(seed))
    };
    let cond = problems::condition_number(&sigma);
    let c = match (a.c, a.a) {
        (Some(c), _) => c,
        (None, Some(f)) if f > 0.0 => cond / f,
        (None, Some(f)) => return Err(CliError::input(format!("--a must be positive, got {f}"))),
        (None, None) => return Err(CliError::input("give --c or --a")),
    };
    let problem = problems::build_condnum(&sigma, c).map_err(CliError::build)?;
    let start = Instant::now();
    let res = solve(&problem, &cfg)?;
    let mut summary = Summary::new("condnum", seed, &cfg, &res, start);
    summary.details = json!({
        "bound": c,
        "condition_in": finite_or_null(cond),
        "condition_out": finite_or_null(problems::condition_number(&res.x)),
    });
    let out = DMatrix::from_row_slice(1, res.x.len(), &res.x);
    Ok(Outcome { summary, trace: res.trace, output: Output::Matrix(out) })
}
