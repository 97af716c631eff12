//! `grahtp`: sparse solvers, simulations and diagnostics from the command
//! line.
//!
//! Exit codes: 0 success, 2 invalid input or usage, 3 numerical failure,
//! 4 the solver stopped at its iteration cap (outputs are still written).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "grahtp", version, about = "Sparsity-constrained estimation by gradient hard thresholding pursuit")]
#[command(args_override_self = true)]
struct Cli {
    /// `key = value` file of default flags; flags on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

const SUBCOMMANDS: &[&str] = &[
    "solve-logistic",
    "solve-precision",
    "simulate-logistic",
    "simulate-precision",
    "diagnose",
    "gen-data",
];

#[derive(Subcommand, Debug)]
enum Command {
    /// Sparse ℓ2-regularized logistic regression on LIBSVM data
    SolveLogistic(SolveLogisticArgs),
    /// Sparse precision matrix from a sample covariance CSV
    SolvePrecision(SolvePrecisionArgs),
    /// Replicated logistic simulation over sample sizes
    SimulateLogistic(SimulateLogisticArgs),
    /// Replicated precision simulation over dimensions
    SimulatePrecision(SimulatePrecisionArgs),
    /// Restricted curvature and contraction constants of an objective
    Diagnose(DiagnoseArgs),
    /// Write a synthetic data set
    GenData(GenDataArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    Grahtp,
    Fgrahtp,
    /// Box-constrained GraHTP (precision tasks only)
    Modified,
}

#[derive(Args, Debug)]
pub struct IterArgs {
    /// Step size (default: estimated from the data)
    #[arg(long, value_parser = positive_f64)]
    pub eta: Option<f64>,
    /// Iteration cap
    #[arg(long, default_value_t = 500, value_parser = positive_usize)]
    pub max_iters: usize,
    /// Relative change ‖x⁽ᵗ⁾ − x⁽ᵗ⁻¹⁾‖ / ‖x⁽ᵗ⁻¹⁾‖ that stops the solver
    #[arg(long, default_value_t = 1e-4, value_parser = positive_f64)]
    pub tol: f64,
    /// Seed for every randomized step
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SolveLogisticArgs {
    /// LIBSVM file (labels ±1 or 0/1, 1-based feature indices)
    #[arg(long)]
    pub input: PathBuf,
    /// Number of features; defaults to the largest index in the file
    #[arg(long, value_parser = positive_usize)]
    pub dim: Option<usize>,
    /// Sparsity budget
    #[arg(long, value_parser = positive_usize)]
    pub k: usize,
    /// ℓ2 regularization weight
    #[arg(long, default_value_t = 1e-4, value_parser = nonnegative_f64)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = SolverChoice::Grahtp)]
    pub solver: SolverChoice,
    #[command(flatten)]
    pub iter: IterArgs,
    /// Output directory (weights.csv, trace.csv)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SolvePrecisionArgs {
    /// Dense CSV sample covariance
    #[arg(long)]
    pub input: PathBuf,
    /// Number of samples behind the covariance
    #[arg(long, value_parser = positive_usize)]
    pub n: usize,
    /// Number of off-diagonal pairs allowed
    #[arg(long, value_parser = positive_usize)]
    pub k: usize,
    /// ξ in the eigenvalue box rule
    #[arg(long, default_value_t = 1e-2, value_parser = positive_f64)]
    pub xi: f64,
    /// ADM penalty (default: matched to the covariance scale)
    #[arg(long, value_parser = positive_f64)]
    pub rho_pen: Option<f64>,
    #[arg(long, value_enum, default_value_t = SolverChoice::Modified)]
    pub solver: SolverChoice,
    #[command(flatten)]
    pub iter: IterArgs,
    /// Output directory (precision.csv, edges.csv, trace.csv)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SimulateLogisticArgs {
    #[arg(long, value_parser = positive_usize)]
    pub p: usize,
    /// Nonzeros in the true weight vector
    #[arg(long, value_parser = positive_usize)]
    pub k_true: usize,
    /// Sparsity budget (default: the true sparsity)
    #[arg(long, value_parser = positive_usize)]
    pub k: Option<usize>,
    /// Comma-separated sample sizes
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive_usize)]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 10, value_parser = positive_usize)]
    pub replications: usize,
    /// Correlation of neighbouring features
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub ar_rho: f64,
    #[arg(long, default_value_t = 1e-4, value_parser = nonnegative_f64)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = SolverChoice::Grahtp)]
    pub solver: SolverChoice,
    #[command(flatten)]
    pub iter: IterArgs,
    /// Output directory (table.csv)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SimulatePrecisionArgs {
    /// Comma-separated dimensions
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive_usize)]
    pub ps: Vec<usize>,
    /// Training sample size
    #[arg(long, default_value_t = 100, value_parser = positive_usize)]
    pub n: usize,
    /// Held-out sample size used to choose k
    #[arg(long, default_value_t = 100, value_parser = positive_usize)]
    pub held_out: usize,
    /// Comma-separated candidate pair budgets (default: p/2, p, 3p/2, 2p, 3p)
    #[arg(long, value_delimiter = ',', value_parser = positive_usize)]
    pub k_grid: Vec<usize>,
    /// Probability of an edge in the random graph
    #[arg(long, default_value_t = 0.1, value_parser = open_unit_interval)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 10, value_parser = positive_usize)]
    pub replications: usize,
    #[arg(long, default_value_t = 1e-2, value_parser = positive_f64)]
    pub xi: f64,
    #[arg(long, value_parser = positive_f64)]
    pub rho_pen: Option<f64>,
    #[arg(long, value_enum, default_value_t = SolverChoice::Modified)]
    pub solver: SolverChoice,
    #[command(flatten)]
    pub iter: IterArgs,
    /// Output directory (table.csv, heatmap_p<P>.csv)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveKind {
    /// ½xᵀQx with Q read from a dense CSV
    Quadratic,
    /// ½‖y − Ax‖² from a dense CSV whose last column is y
    LeastSquares,
    /// Logistic loss on LIBSVM data
    Logistic,
}

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    #[arg(long, value_enum)]
    pub objective: ObjectiveKind,
    #[arg(long)]
    pub input: PathBuf,
    /// Support size of the curvature estimate
    #[arg(long, value_parser = positive_usize)]
    pub s: usize,
    /// Number of supports sampled
    #[arg(long, default_value_t = 64, value_parser = positive_usize)]
    pub trials: usize,
    /// Step size the shrinkage rates refer to (default: 1 / M_s)
    #[arg(long, value_parser = positive_f64)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 1e-4, value_parser = nonnegative_f64)]
    pub lambda: f64,
    /// Weights (index,value CSV) at which to report the restricted gradient
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report to DIR/diagnose.txt
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DataKind {
    Logistic,
    Precision,
    LeastSquares,
}

#[derive(Args, Debug)]
pub struct GenDataArgs {
    #[arg(long, value_enum)]
    pub kind: DataKind,
    #[arg(long, value_parser = positive_usize)]
    pub p: usize,
    #[arg(long, value_parser = positive_usize)]
    pub n: usize,
    /// Nonzeros of the planted vector (logistic, least-squares)
    #[arg(long, value_parser = positive_usize)]
    pub k_true: Option<usize>,
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub ar_rho: f64,
    #[arg(long, default_value_t = 0.1, value_parser = open_unit_interval)]
    pub edge_prob: f64,
    /// Observation noise standard deviation (least-squares)
    #[arg(long, default_value_t = 0.0, value_parser = nonnegative_f64)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

fn parse_finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    parse_finite(s).and_then(|v| if v > 0.0 { Ok(v) } else { Err(format!("`{s}` must be positive")) })
}

fn nonnegative_f64(s: &str) -> Result<f64, String> {
    parse_finite(s).and_then(|v| if v >= 0.0 { Ok(v) } else { Err(format!("`{s}` must be nonnegative")) })
}

fn unit_interval(s: &str) -> Result<f64, String> {
    parse_finite(s).and_then(|v| {
        if (0.0..1.0).contains(&v) {
            Ok(v)
        } else {
            Err(format!("`{s}` must lie in [0, 1)"))
        }
    })
}

fn open_unit_interval(s: &str) -> Result<f64, String> {
    parse_finite(s).and_then(|v| {
        if v > 0.0 && v < 1.0 {
            Ok(v)
        } else {
            Err(format!("`{s}` must lie in (0, 1)"))
        }
    })
}

fn main() -> ExitCode {
    let args = match config::expand_config(std::env::args_os().collect(), SUBCOMMANDS) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(commands::EXIT_INPUT);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version print to stdout and exit 0; usage errors exit 2
            e.print().ok();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_INPUT } else { 0 });
        }
    };
    let result = match cli.command {
        Command::SolveLogistic(a) => commands::solve_logistic(&a),
        Command::SolvePrecision(a) => commands::solve_precision(&a),
        Command::SimulateLogistic(a) => commands::simulate_logistic(&a),
        Command::SimulatePrecision(a) => commands::simulate_precision(&a),
        Command::Diagnose(a) => commands::diagnose(&a),
        Command::GenData(a) => commands::gen_data(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
