//! Builders for the five worked problem families and their path drivers.

mod clustering;
mod condnum;
mod cvxreg;
mod denoise;
mod metric;
pub mod synthetic;

pub use clustering::{
    build_clustering, cluster_labels, coalescence_tolerance, cvxclusterpath, knn_gaussian_weights,
    ClusterPath, ClusterPathEntry,
};
pub use condnum::{build_condnum, condition_number, singular_values, SVD_GUARD};
pub use cvxreg::{build_cvxreg, cvxreg_operator};
pub use denoise::{build_denoise, denoise_path, tv_norm, DenoiseLevel};
pub use metric::{build_metric, trivec, untrivec};
