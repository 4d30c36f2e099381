use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use proxdist::engine::ProblemKind;
use proxdist::{Algorithm, LinearSolver, SolverConfig};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "proxdist", version, about = "Proximal distance solvers for fusion-constrained least squares")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nearest metric to a dissimilarity matrix.
    Metric(MetricArgs),
    /// Convex regression through supporting hyperplanes.
    Cvxreg(CvxregArgs),
    /// Convex clustering path by sparsity search.
    Cluster(ClusterArgs),
    /// Total-variation image denoising path.
    Denoise(DenoiseArgs),
    /// Condition-number reduction of a spectrum.
    Condnum(CondnumArgs),
    /// Run the built-in invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Mm,
    Sd,
    Admm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LinearArg {
    Auto,
    Cg,
    Lsqr,
    Exact,
}

/// Engine controls shared by every problem. Unset tolerances fall back to
/// the per-problem defaults.
#[derive(Clone, Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Mm)]
    pub solver: SolverArg,
    #[arg(long = "linear-solver", value_enum, default_value_t = LinearArg::Auto)]
    pub linear_solver: LinearArg,
    /// Inner gradient-norm tolerance δ_h.
    #[arg(long)]
    pub grad_tol: Option<f64>,
    /// Outer distance tolerance δ_d.
    #[arg(long)]
    pub dist_tol: Option<f64>,
    /// Outer progress tolerance δ_q.
    #[arg(long)]
    pub progress_tol: Option<f64>,
    /// Annealing multiplier r in ρ(t) = min(ρ_max, r^(t−1)).
    #[arg(long = "r")]
    pub multiplier: Option<f64>,
    #[arg(long)]
    pub rho_max: Option<f64>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    #[arg(long)]
    pub max_inner: Option<usize>,
    #[arg(long)]
    pub nesterov_delay: Option<usize>,
    /// Disable Nesterov acceleration.
    #[arg(long)]
    pub no_accel: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs with seeds seed, seed+1, …; useful with synthetic data.
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// Trace CSV path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Summary JSON path; stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Problem output path (solution CSV, labels CSV or PGM image).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SolverArgs {
    pub fn config(&self, kind: ProblemKind) -> Result<SolverConfig, CliError> {
        let algorithm = match self.solver {
            SolverArg::Mm => Algorithm::Mm,
            SolverArg::Sd => Algorithm::SteepestDescent,
            SolverArg::Admm => Algorithm::Admm,
        };
        let mut cfg = SolverConfig::for_problem(kind, algorithm);
        cfg.linear_solver = match self.linear_solver {
            LinearArg::Auto => LinearSolver::Auto,
            LinearArg::Cg => LinearSolver::Cg,
            LinearArg::Lsqr => LinearSolver::Lsqr,
            LinearArg::Exact => LinearSolver::Exact,
        };
        let s = &mut cfg.stopping;
        if let Some(v) = self.grad_tol {
            s.grad_tol = v;
        }
        if let Some(v) = self.dist_tol {
            s.dist_tol = v;
        }
        if let Some(v) = self.progress_tol {
            s.progress_tol = v;
        }
        if let Some(v) = self.max_outer {
            s.max_outer = v;
        }
        if let Some(v) = self.max_inner {
            s.max_inner = v;
        }
        if let Some(v) = self.nesterov_delay {
            s.nesterov_delay = v;
        }
        if self.grad_tol.is_some() {
            cfg.linear_tol = SolverConfig::linear_tol_for(cfg.stopping.grad_tol);
        }
        if let Some(v) = self.multiplier {
            cfg.schedule.multiplier = v;
        }
        if let Some(v) = self.rho_max {
            cfg.schedule.rho_max = v;
        }
        cfg.accelerate = !self.no_accel;
        if self.replicates == 0 {
            return Err(CliError::input("--replicates must be at least 1"));
        }
        cfg.validate().map_err(CliError::build)?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// Symmetric dissimilarity matrix CSV.
    #[arg(long, required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// Optional symmetric weight matrix CSV.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Uniform [0, 10] dissimilarities on m nodes.
    #[arg(long, conflicts_with = "input")]
    pub synthetic: bool,
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct CvxregArgs {
    /// CSV with one sample per row: d predictor columns, then the response.
    #[arg(long, required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// Responses ‖x‖² + noise at uniform predictors in [−1, 1]^d.
    #[arg(long, conflicts_with = "input")]
    pub synthetic: bool,
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 0.1)]
    pub noise_var: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClusterData {
    Gaussians,
    Spirals,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// CSV with one sample per row.
    #[arg(long, required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// Optional ground-truth labels, one per line, for ARI and NMI.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "input")]
    pub synthetic: Option<ClusterData>,
    /// Samples for synthetic data.
    #[arg(long, default_value_t = 60)]
    pub m: usize,
    /// Neighbours per sample in the weight graph.
    #[arg(long, default_value_t = 10)]
    pub knn: usize,
    /// Gaussian kernel scale φ in exp(−φ‖x_i − x_j‖²).
    #[arg(long, default_value_t = 0.5)]
    pub phi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub s0: f64,
    #[arg(long, default_value_t = 0.05)]
    pub s_step: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    /// Noisy image, PGM (P2 or P5).
    #[arg(long, required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// Clean image for MSE and PSNR.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Piecewise-constant image plus Gaussian noise.
    #[arg(long, conflicts_with = "input")]
    pub synthetic: bool,
    #[arg(long, default_value_t = 64)]
    pub rows: usize,
    #[arg(long, default_value_t = 64)]
    pub cols: usize,
    #[arg(long, default_value_t = 0.2)]
    pub noise_sd: f64,
    /// Comma-separated path levels s; γ = (1 − s)·TV(input).
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
    pub levels: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub peak: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true)))]
#[command(group(ArgGroup::new("bound").required(true).args(["c", "a"])))]
pub struct CondnumArgs {
    /// Singular values, any CSV shape, sorted on read.
    #[arg(long, group = "source")]
    pub sigma: Option<PathBuf>,
    /// Matrix whose singular values are used.
    #[arg(long, group = "source")]
    pub matrix: Option<PathBuf>,
    /// Random spectrum with condition number `kappa`.
    #[arg(long, group = "source")]
    pub synthetic: bool,
    #[arg(long, default_value_t = 10)]
    pub p: usize,
    #[arg(long, default_value_t = 100.0)]
    pub kappa: f64,
    /// Target bound c on the condition number.
    #[arg(long, conflicts_with = "a")]
    pub c: Option<f64>,
    /// Reduce the condition number by this factor: c = cond(σ)/a.
    #[arg(long)]
    pub a: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
