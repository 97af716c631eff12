//! Replicated simulation sweeps and their aggregate tables.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::generators::{gen_logistic, gen_precision_model, sample_covariance, LogisticSimConfig, PrecisionSimConfig};
use super::metrics::{compute_matrix_metrics, compute_metrics, MetricsReport, DEFAULT_THRESHOLD};
use super::rng::sim_rng;
use crate::error::{invalid, Error, Result};
use crate::numerics::Matrix;
use crate::precision::{diagonal_estimate, logdet_loss, modified_grahtp, AdmConfig, LogDetProblem, DEFAULT_XI};
use crate::solver::{default_step_size, fgrahtp, grahtp, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Grahtp,
    Fgrahtp,
    /// Box-constrained GraHTP for precision matrices.
    Modified,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Grahtp => "grahtp",
            SolverKind::Fgrahtp => "fgrahtp",
            SolverKind::Modified => "modified",
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grahtp" => Ok(SolverKind::Grahtp),
            "fgrahtp" => Ok(SolverKind::Fgrahtp),
            "modified" => Ok(SolverKind::Modified),
            other => Err(invalid(format!("unknown solver `{other}` (expected grahtp, fgrahtp or modified)"))),
        }
    }
}

/// Logistic sweep over sample sizes. `base.n` is ignored.
#[derive(Clone, Debug)]
pub struct LogisticSweep {
    pub base: LogisticSimConfig,
    pub ns: Vec<usize>,
    /// Sparsity budget handed to the solver.
    pub k: usize,
    pub solver: SolverKind,
    /// `None` selects [`default_step_size`].
    pub eta: Option<f64>,
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl LogisticSweep {
    pub fn new(base: LogisticSimConfig, ns: Vec<usize>, k: usize) -> Self {
        Self {
            base,
            ns,
            k,
            solver: SolverKind::Grahtp,
            eta: None,
            max_iters: SolverConfig::DEFAULT_MAX_ITERS,
            rel_tol: SolverConfig::DEFAULT_REL_TOL,
        }
    }
}

/// Precision sweep over dimensions with `k` chosen on a held-out sample.
/// `base.p` is ignored.
#[derive(Clone, Debug)]
pub struct PrecisionSweep {
    pub base: PrecisionSimConfig,
    pub ps: Vec<usize>,
    /// Candidate pair budgets; empty selects [`default_k_grid`].
    pub k_grid: Vec<usize>,
    pub held_out: usize,
    pub xi: f64,
    /// `None` selects [`default_precision_step`].
    pub eta: Option<f64>,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub adm: AdmConfig,
}

impl PrecisionSweep {
    pub fn new(base: PrecisionSimConfig, ps: Vec<usize>) -> Self {
        Self {
            base,
            ps,
            k_grid: Vec::new(),
            held_out: 100,
            xi: DEFAULT_XI,
            eta: None,
            max_iters: 100,
            rel_tol: SolverConfig::DEFAULT_REL_TOL,
            adm: AdmConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Task {
    Logistic(LogisticSweep),
    Precision(PrecisionSweep),
}

/// `{p/2, p, 3p/2, 2p, 3p}` pairs, capped at `p(p − 1)/2`.
pub fn default_k_grid(p: usize) -> Vec<usize> {
    let max_pairs = p * (p - 1) / 2;
    let mut grid: Vec<usize> = [p / 2, p, 3 * p / 2, 2 * p, 3 * p]
        .into_iter()
        .map(|k| k.clamp(1, max_pairs))
        .collect();
    grid.dedup();
    grid
}

/// `(p / Tr Σ_n)²`, the reciprocal of the mean eigenvalue of the Hessian
/// `Σ_n ⊗ Σ_n` the loss has near its population minimizer.
pub fn default_precision_step(problem: &LogDetProblem) -> f64 {
    let mean_eig = problem.covariance().trace() / problem.dim() as f64;
    1.0 / (mean_eig * mean_eig)
}

/// Result of one successful replication.
#[derive(Clone, Debug)]
pub struct Replicate {
    pub metrics: MetricsReport,
    pub iterations: usize,
    /// Selected pair budget (precision) or the fixed `k` (logistic).
    pub chosen_k: usize,
    /// Frobenius error of the diagonal-only estimate (precision only).
    pub baseline_frobenius: Option<f64>,
    /// Nonzero pattern of the estimate (precision only).
    pub pattern: Option<Matrix>,
}

pub fn logistic_replicate(sweep: &LogisticSweep, n: usize, seed: u64) -> Result<Replicate> {
    let cfg = LogisticSimConfig { n, seed, ..sweep.base.clone() };
    let sample = gen_logistic(&cfg)?;
    let obj = &sample.data;
    let start = Instant::now();
    let eta = match sweep.eta {
        Some(eta) => eta,
        None => default_step_size(obj, sweep.k, seed)?,
    };
    let mut scfg = SolverConfig::new(sweep.k, eta);
    scfg.max_iters = sweep.max_iters;
    scfg.rel_tol = sweep.rel_tol;
    scfg.seed = seed;
    let x0 = vec![0.0; cfg.p];
    let (w, trace) = match sweep.solver {
        SolverKind::Grahtp => grahtp(obj, &scfg, &x0)?,
        SolverKind::Fgrahtp => fgrahtp(obj, &scfg, &x0)?,
        SolverKind::Modified => return Err(invalid("the modified solver applies to precision tasks only")),
    };
    let mut metrics = compute_metrics(&sample.w_true, &w, DEFAULT_THRESHOLD)?;
    metrics.seconds = start.elapsed().as_secs_f64();
    Ok(Replicate {
        metrics,
        iterations: trace.iterations(),
        chosen_k: sweep.k,
        baseline_frobenius: None,
        pattern: None,
    })
}

/// Fits one estimate per candidate `k` and keeps the one with the smallest
/// held-out loss `−log det Ω + ⟨Σ_val, Ω⟩` (smaller `k` on ties).
pub fn precision_replicate(sweep: &PrecisionSweep, p: usize, seed: u64) -> Result<Replicate> {
    if sweep.held_out == 0 {
        return Err(invalid("held-out sample must be non-empty"));
    }
    let mut rng = sim_rng(seed);
    let model = gen_precision_model(&mut rng, p, sweep.base.edge_prob)?;
    let train = model.sample(&mut rng, sweep.base.n);
    let validation = model.sample(&mut rng, sweep.held_out);
    let cov_val = sample_covariance(&validation);
    let problem = LogDetProblem::new(sample_covariance(&train), sweep.base.n, sweep.xi)?;

    let start = Instant::now();
    let eta = sweep.eta.unwrap_or_else(|| default_precision_step(&problem));
    let grid = if sweep.k_grid.is_empty() {
        default_k_grid(p)
    } else {
        sweep.k_grid.clone()
    };
    let mut best: Option<(f64, usize, Matrix, usize)> = None;
    for &k in &grid {
        let mut cfg = SolverConfig::new(k, eta);
        cfg.max_iters = sweep.max_iters;
        cfg.rel_tol = sweep.rel_tol;
        let (omega, trace) = modified_grahtp(&problem, &cfg, &sweep.adm)?;
        let loss = logdet_loss(&cov_val, &omega)?;
        if best.as_ref().is_none_or(|b| loss < b.0) {
            best = Some((loss, k, omega, trace.iterations()));
        }
    }
    let (_, k, omega, iterations) = best.ok_or_else(|| invalid("empty k grid"))?;
    let seconds = start.elapsed().as_secs_f64();

    let baseline = diagonal_estimate(&problem, &sweep.adm)?;
    let mut metrics = compute_matrix_metrics(&model.omega, &omega, DEFAULT_THRESHOLD)?;
    metrics.seconds = seconds;
    Ok(Replicate {
        metrics,
        iterations,
        chosen_k: k,
        baseline_frobenius: Some(model.omega.sub(&baseline).frobenius_norm()),
        pattern: Some(omega.map(|v| if v.abs() > DEFAULT_THRESHOLD { 1.0 } else { 0.0 })),
    })
}

/// Mean and sample standard deviation (0 for a single value, NaN for none).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Aggregate of one sweep cell.
#[derive(Clone, Debug)]
pub struct CellSummary {
    /// Cell parameters as `(name, value)`.
    pub params: Vec<(&'static str, String)>,
    pub replications: usize,
    /// `(replication index, error message)` for failed replications.
    pub failures: Vec<(usize, String)>,
    /// `(metric name, mean, std)` over successful replications.
    pub metrics: Vec<(&'static str, f64, f64)>,
    /// Mean wall-clock seconds per replication, kept out of the CSV.
    pub mean_seconds: f64,
    /// Frequency with which each entry was estimated nonzero.
    pub heatmap: Option<Matrix>,
}

impl CellSummary {
    pub fn metric(&self, name: &str) -> Option<(f64, f64)> {
        self.metrics.iter().find(|m| m.0 == name).map(|m| (m.1, m.2))
    }

    pub fn param(&self, name: &str) -> Option<&str> {
        self.params.iter().find(|p| p.0 == name).map(|p| p.1.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub cells: Vec<CellSummary>,
}

impl SweepTable {
    /// One row per cell: parameters, replication and failure counts, then
    /// `<metric>_mean,<metric>_std` pairs. Timing is left out so the bytes
    /// depend only on the seed.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let Some(first) = self.cells.first() else {
            return out;
        };
        let mut header: Vec<String> = first.params.iter().map(|p| p.0.to_string()).collect();
        header.push("replications".into());
        header.push("failures".into());
        for m in &first.metrics {
            header.push(format!("{}_mean", m.0));
            header.push(format!("{}_std", m.0));
        }
        out.push_str(&header.join(","));
        out.push('\n');
        for cell in &self.cells {
            let mut row: Vec<String> = cell.params.iter().map(|p| p.1.clone()).collect();
            row.push(cell.replications.to_string());
            row.push(cell.failures.len().to_string());
            for m in &cell.metrics {
                row.push(m.1.to_string());
                row.push(m.2.to_string());
            }
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }
}

fn summarize(params: Vec<(&'static str, String)>, results: Vec<Result<Replicate>>) -> CellSummary {
    let replications = results.len();
    let mut failures = Vec::new();
    let mut ok = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(rep) => ok.push(rep),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    let column = |f: &dyn Fn(&Replicate) -> Option<f64>| -> Vec<f64> { ok.iter().filter_map(f).collect() };
    let mut metrics: Vec<(&'static str, Vec<f64>)> = vec![
        ("estimation_error", column(&|r| Some(r.metrics.estimation_error))),
        ("f_score", column(&|r| Some(r.metrics.f_score))),
        ("frobenius", column(&|r| Some(r.metrics.frobenius))),
        ("specificity", column(&|r| Some(r.metrics.specificity))),
        ("sensitivity", column(&|r| Some(r.metrics.sensitivity))),
        ("mcc", column(&|r| Some(r.metrics.mcc))),
        ("iterations", column(&|r| Some(r.iterations as f64))),
        ("chosen_k", column(&|r| Some(r.chosen_k as f64))),
    ];
    if ok.iter().any(|r| r.baseline_frobenius.is_some()) {
        metrics.push(("baseline_frobenius", column(&|r| r.baseline_frobenius)));
    }
    let heatmap = ok.iter().filter_map(|r| r.pattern.as_ref()).fold(None::<Matrix>, |acc, m| {
        Some(match acc {
            Some(a) => a.add(m),
            None => m.clone(),
        })
    });
    let heatmap = heatmap.map(|h| h.scale(1.0 / ok.len() as f64));
    let (mean_seconds, _) = mean_std(&column(&|r| Some(r.metrics.seconds)));
    CellSummary {
        params,
        replications,
        failures,
        metrics: metrics
            .into_iter()
            .map(|(name, v)| {
                let (m, s) = mean_std(&v);
                (name, m, s)
            })
            .collect(),
        mean_seconds,
        heatmap,
    }
}

/// Runs every cell of the sweep. Replication `r` of each cell uses seed
/// `base seed + r`; replications run in parallel and are aggregated in
/// index order, so the table depends only on the task.
pub fn run_replications(task: &Task) -> Result<SweepTable> {
    let cells = match task {
        Task::Logistic(sweep) => {
            if sweep.ns.is_empty() {
                return Err(invalid("no sample sizes to sweep"));
            }
            for &n in &sweep.ns {
                LogisticSimConfig { n, ..sweep.base.clone() }.validate()?;
            }
            if sweep.k == 0 || sweep.k > sweep.base.p {
                return Err(invalid(format!("k = {} must lie in [1, p = {}]", sweep.k, sweep.base.p)));
            }
            sweep
                .ns
                .iter()
                .map(|&n| {
                    let results = (0..sweep.base.replications)
                        .into_par_iter()
                        .map(|r| logistic_replicate(sweep, n, sweep.base.seed.wrapping_add(r as u64)))
                        .collect();
                    let params = vec![
                        ("solver", sweep.solver.as_str().to_string()),
                        ("p", sweep.base.p.to_string()),
                        ("k", sweep.k.to_string()),
                        ("n", n.to_string()),
                    ];
                    summarize(params, results)
                })
                .collect()
        }
        Task::Precision(sweep) => {
            if sweep.ps.is_empty() {
                return Err(invalid("no dimensions to sweep"));
            }
            for &p in &sweep.ps {
                PrecisionSimConfig { p, ..sweep.base.clone() }.validate()?;
            }
            sweep
                .ps
                .iter()
                .map(|&p| {
                    let results = (0..sweep.base.replications)
                        .into_par_iter()
                        .map(|r| precision_replicate(sweep, p, sweep.base.seed.wrapping_add(r as u64)))
                        .collect();
                    let params = vec![
                        ("solver", SolverKind::Modified.as_str().to_string()),
                        ("p", p.to_string()),
                        ("n", sweep.base.n.to_string()),
                    ];
                    summarize(params, results)
                })
                .collect()
        }
    };
    Ok(SweepTable { cells })
}
