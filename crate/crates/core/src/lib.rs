//! Gradient hard thresholding pursuit (GraHTP) and its fast variant for
//! sparsity-constrained smooth convex minimization.
//!
//! The crate is organised around the [`Objective`] trait: [`grahtp`] and
//! [`fgrahtp`] drive any objective that can report its value, gradient and a
//! support-restricted minimizer. Three objectives ship with it:
//!
//! * [`least_squares::LinearModel`], where the two solvers coincide with
//!   hard thresholding pursuit and iterative hard thresholding,
//! * [`logistic::LogisticData`], ℓ2-regularized logistic regression,
//! * [`precision::LogDetProblem`], sparse precision matrix estimation solved
//!   with [`precision::modified_grahtp`] and an ADM inner solver.
//!
//! [`experiments`] holds the seeded generators, metrics and replication
//! drivers used by the CLI and the acceptance suite.

pub mod error;
pub mod experiments;
pub mod io;
pub mod least_squares;
pub mod logistic;
pub mod numerics;
pub mod precision;
pub mod solver;

pub use error::{Error, Result};
pub use numerics::{hard_threshold, sym_eigen, EigenDecomposition, Matrix, PairSupport, SupportSet, SymMatrix};
pub use solver::{
    check_condition_c, default_step_size, estimate_condition, fgrahtp, grahtp, ConditionEstimate, Debiased,
    Objective, SolverConfig, SolverTrace, Termination,
};
