//! Seeded synthetic experiments: data generators, recovery metrics and
//! replicated sweeps.

mod generators;
mod metrics;
mod replications;
mod rng;

pub use generators::{
    ar_features, gen_least_squares, gen_logistic, gen_precision, gen_precision_model, logistic_labels,
    sample_covariance, sparse_normal_vector, LeastSquaresSample, LogisticSample, LogisticSimConfig, PrecisionModel,
    PrecisionSample, PrecisionSimConfig,
};
pub use metrics::{compute_matrix_metrics, compute_metrics, Confusion, MetricsReport, DEFAULT_THRESHOLD};
pub use replications::{
    default_k_grid, default_precision_step, logistic_replicate, mean_std, precision_replicate, run_replications,
    CellSummary, LogisticSweep, PrecisionSweep, Replicate, SolverKind, SweepTable, Task,
};
pub use rng::{normal_vec, sim_rng, standard_normal, SimRng};
