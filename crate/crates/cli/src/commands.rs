//! Subcommand bodies. Each returns the process exit code on success.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use grahtp::experiments::{
    default_precision_step, gen_least_squares, gen_logistic, gen_precision, run_replications, sample_covariance,
    LogisticSimConfig, LogisticSweep, PrecisionSimConfig, PrecisionSweep, SolverKind, SweepTable, Task,
};
use grahtp::io::{
    dense_csv, edge_list_csv, libsvm, parse_vector_csv, read_dense_csv, read_libsvm, trace_csv, vector_csv, LabeledData,
};
use grahtp::least_squares::LinearModel;
use grahtp::logistic::{diagnostics, LogisticData};
use grahtp::precision::{modified_grahtp, AdmConfig, LogDetProblem};
use grahtp::solver::{restricted_gradient_norm, Quadratic};
use grahtp::{
    default_step_size, estimate_condition, fgrahtp, grahtp as run_grahtp, Matrix, Objective, PairSupport, SolverConfig,
    Termination,
};

use crate::{
    DataKind, DiagnoseArgs, GenDataArgs, IterArgs, ObjectiveKind, SimulateLogisticArgs, SimulatePrecisionArgs,
    SolveLogisticArgs, SolvePrecisionArgs, SolverChoice,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_MAX_ITERS: u8 = 4;

/// Numerical failures map to 3; everything else (bad files, bad values) to 2.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<grahtp::Error>() {
            return match err {
                grahtp::Error::Diverged { .. } | grahtp::Error::Generation(_) => EXIT_NUMERICAL,
                _ => EXIT_INPUT,
            };
        }
    }
    EXIT_INPUT
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn solver_config(k: usize, eta: f64, iter: &IterArgs) -> SolverConfig {
    let mut cfg = SolverConfig::new(k, eta);
    cfg.max_iters = iter.max_iters;
    cfg.rel_tol = iter.tol;
    cfg.seed = iter.seed;
    cfg
}

fn finish(termination: Termination) -> u8 {
    if termination == Termination::MaxIterations {
        eprintln!("warning: stopped at the iteration cap before converging");
        EXIT_MAX_ITERS
    } else {
        EXIT_OK
    }
}

pub fn solve_logistic(args: &SolveLogisticArgs) -> Result<u8> {
    let data = read_libsvm(&args.input, args.dim).with_context(|| format!("reading {}", args.input.display()))?;
    let obj = LogisticData::new(data.features, data.labels, args.lambda)?;
    let p = obj.dim();
    if args.k > p {
        bail!(grahtp::Error::InvalidArgument(format!("k = {} exceeds the dimension {p}", args.k)));
    }
    let start = Instant::now();
    let eta = match args.iter.eta {
        Some(eta) => eta,
        None => default_step_size(&obj, args.k, args.iter.seed)?,
    };
    let cfg = solver_config(args.k, eta, &args.iter);
    let x0 = vec![0.0; p];
    let (w, trace) = match args.solver {
        SolverChoice::Grahtp => run_grahtp(&obj, &cfg, &x0)?,
        SolverChoice::Fgrahtp => fgrahtp(&obj, &cfg, &x0)?,
        SolverChoice::Modified => bail!(grahtp::Error::InvalidArgument(
            "the modified solver applies to precision estimation only".into()
        )),
    };
    let seconds = start.elapsed().as_secs_f64();

    create_dir(&args.out)?;
    write_file(&args.out, "weights.csv", &vector_csv(&w))?;
    write_file(&args.out, "trace.csv", &trace_csv(&trace))?;
    println!(
        "iterations={} objective={} termination={} nonzeros={} eta={} seconds={:.6}",
        trace.iterations(),
        obj.value(&w),
        trace.termination.as_str(),
        w.iter().filter(|v| **v != 0.0).count(),
        eta,
        seconds
    );
    Ok(finish(trace.termination))
}

fn adm_config(rho_pen: Option<f64>) -> AdmConfig {
    AdmConfig {
        rho: rho_pen,
        ..AdmConfig::default()
    }
}

fn require_modified(solver: SolverChoice) -> Result<()> {
    if solver != SolverChoice::Modified {
        bail!(grahtp::Error::InvalidArgument(
            "precision estimation uses --solver modified".into()
        ));
    }
    Ok(())
}

pub fn solve_precision(args: &SolvePrecisionArgs) -> Result<u8> {
    require_modified(args.solver)?;
    let cov = read_dense_csv(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let problem = LogDetProblem::new(cov, args.n, args.xi)?;
    let start = Instant::now();
    let eta = args.iter.eta.unwrap_or_else(|| default_precision_step(&problem));
    let cfg = solver_config(args.k, eta, &args.iter);
    let (omega, trace) = modified_grahtp(&problem, &cfg, &adm_config(args.rho_pen))?;
    let seconds = start.elapsed().as_secs_f64();

    // the estimate is exactly zero off its support
    let support = PairSupport::of(&omega, 0.0);
    create_dir(&args.out)?;
    write_file(&args.out, "precision.csv", &dense_csv(&omega))?;
    write_file(&args.out, "edges.csv", &edge_list_csv(&omega, &support))?;
    write_file(&args.out, "trace.csv", &trace_csv(&trace))?;
    println!(
        "iterations={} objective={} termination={} edges={} alpha={} beta={} eta={} seconds={:.6}",
        trace.iterations(),
        trace.final_objective().unwrap_or(f64::NAN),
        trace.termination.as_str(),
        support.len(),
        problem.alpha(),
        problem.beta(),
        eta,
        seconds
    );
    Ok(finish(trace.termination))
}

fn write_table(out: &Path, table: &SweepTable) -> Result<u8> {
    create_dir(out)?;
    write_file(out, "table.csv", &table.to_csv())?;
    let mut code = EXIT_OK;
    for cell in &table.cells {
        for (r, msg) in &cell.failures {
            eprintln!("warning: replication {r} failed: {msg}");
        }
        if cell.failures.len() == cell.replications {
            code = EXIT_NUMERICAL;
        }
        let params: Vec<String> = cell.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!(
            "{} replications={} failures={} mean_seconds={:.4}",
            params.join(" "),
            cell.replications,
            cell.failures.len(),
            cell.mean_seconds
        );
    }
    Ok(code)
}

pub fn simulate_logistic(args: &SimulateLogisticArgs) -> Result<u8> {
    let solver = match args.solver {
        SolverChoice::Grahtp => SolverKind::Grahtp,
        SolverChoice::Fgrahtp => SolverKind::Fgrahtp,
        SolverChoice::Modified => bail!(grahtp::Error::InvalidArgument(
            "the modified solver applies to precision simulations only".into()
        )),
    };
    let base = LogisticSimConfig {
        ar_rho: args.ar_rho,
        lambda: args.lambda,
        replications: args.replications,
        seed: args.iter.seed,
        ..LogisticSimConfig::new(args.p, args.k_true, 1)
    };
    let mut sweep = LogisticSweep::new(base, args.ns.clone(), args.k.unwrap_or(args.k_true));
    sweep.solver = solver;
    sweep.eta = args.iter.eta;
    sweep.max_iters = args.iter.max_iters;
    sweep.rel_tol = args.iter.tol;
    let table = run_replications(&Task::Logistic(sweep))?;
    write_table(&args.out, &table)
}

pub fn simulate_precision(args: &SimulatePrecisionArgs) -> Result<u8> {
    require_modified(args.solver)?;
    let base = PrecisionSimConfig {
        edge_prob: args.edge_prob,
        replications: args.replications,
        seed: args.iter.seed,
        ..PrecisionSimConfig::new(2, args.n)
    };
    let mut sweep = PrecisionSweep::new(base, args.ps.clone());
    sweep.k_grid = args.k_grid.clone();
    sweep.held_out = args.held_out;
    sweep.xi = args.xi;
    sweep.eta = args.iter.eta;
    sweep.max_iters = args.iter.max_iters;
    sweep.rel_tol = args.iter.tol;
    sweep.adm = adm_config(args.rho_pen);
    let table = run_replications(&Task::Precision(sweep))?;
    let code = write_table(&args.out, &table)?;
    for cell in &table.cells {
        if let (Some(p), Some(h)) = (cell.param("p"), &cell.heatmap) {
            write_file(&args.out, &format!("heatmap_p{p}.csv"), &dense_csv(h))?;
        }
    }
    Ok(code)
}

/// Splits a dense CSV into the design (all but the last column) and the
/// observations (last column).
fn split_least_squares(m: &Matrix) -> Result<LinearModel> {
    if m.cols() < 2 {
        bail!(grahtp::Error::InvalidArgument(
            "least-squares input needs at least one feature column and the observation column".into()
        ));
    }
    let p = m.cols() - 1;
    let a = m.select_columns(&(0..p).collect::<Vec<_>>());
    Ok(LinearModel::new(a, m.column(p))?)
}

fn curvature_report<O: Objective + ?Sized>(obj: &O, args: &DiagnoseArgs, out: &mut String) -> Result<()> {
    let mut est = estimate_condition(obj, args.s, args.trials, args.seed)?;
    if let Some(eta) = args.eta {
        est = est.with_step(eta);
    }
    writeln!(out, "s={}", est.s)?;
    writeln!(out, "supports_sampled={}", est.supports_sampled)?;
    writeln!(out, "exhaustive={}", est.exhaustive)?;
    writeln!(out, "m_s={}", est.min_curvature)?;
    writeln!(out, "M_s={}", est.max_curvature)?;
    writeln!(out, "negative_curvature={}", est.negative_curvature)?;
    writeln!(out, "zeta={}", est.zeta)?;
    writeln!(out, "zeta_max={}", est.zeta_max())?;
    writeln!(out, "rho_s={}", est.rho)?;
    writeln!(out, "eta={}", est.eta)?;
    writeln!(out, "mu1={}", est.mu1)?;
    writeln!(out, "mu2={}", est.mu2)?;
    writeln!(out, "safe_step={}", est.safe_step())?;
    Ok(())
}

fn read_reference(path: &Path, p: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut w = parse_vector_csv(&text)?;
    if w.len() > p {
        bail!(grahtp::Error::DimensionMismatch { expected: p, actual: w.len() });
    }
    w.resize(p, 0.0);
    Ok(w)
}

pub fn diagnose(args: &DiagnoseArgs) -> Result<u8> {
    let mut out = String::new();
    let read_err = || format!("reading {}", args.input.display());
    match args.objective {
        ObjectiveKind::Quadratic => {
            let q = read_dense_csv(&args.input).with_context(read_err)?;
            let p = q.rows();
            let obj = Quadratic::new(q, vec![0.0; p])?;
            writeln!(out, "objective=quadratic")?;
            curvature_report(&obj, args, &mut out)?;
            if let Some(r) = &args.reference {
                let w = read_reference(r, obj.dim())?;
                writeln!(out, "restricted_gradient_norm={}", restricted_gradient_norm(&obj, &w, args.s)?)?;
            }
        }
        ObjectiveKind::LeastSquares => {
            let obj = split_least_squares(&read_dense_csv(&args.input).with_context(read_err)?)?;
            writeln!(out, "objective=least-squares")?;
            curvature_report(&obj, args, &mut out)?;
            if let Some(r) = &args.reference {
                let w = read_reference(r, obj.dim())?;
                writeln!(out, "restricted_gradient_norm={}", restricted_gradient_norm(&obj, &w, args.s)?)?;
            }
        }
        ObjectiveKind::Logistic => {
            let data = read_libsvm(&args.input, None).with_context(read_err)?;
            let obj = LogisticData::new(data.features, data.labels, args.lambda)?;
            writeln!(out, "objective=logistic")?;
            curvature_report(&obj, args, &mut out)?;
            let reference = match &args.reference {
                Some(r) => Some(read_reference(r, obj.dim())?),
                None => None,
            };
            if args.lambda > 0.0 {
                let d = diagnostics(&obj, args.s, reference.as_deref())?;
                writeln!(out, "radius_s={}", d.constants.r_s)?;
                writeln!(out, "bound_zeta={}", d.constants.zeta)?;
                writeln!(out, "bound_rho_s={}", d.constants.rho)?;
                if let (Some(g), Some(r)) = (d.gradient_norm, d.ridge_term) {
                    writeln!(out, "restricted_gradient_norm={g}")?;
                    writeln!(out, "ridge_term={r}")?;
                }
            } else if let Some(w) = &reference {
                writeln!(out, "restricted_gradient_norm={}", restricted_gradient_norm(&obj, w, args.s)?)?;
            }
        }
    }
    print!("{out}");
    if let Some(dir) = &args.out {
        create_dir(dir)?;
        write_file(dir, "diagnose.txt", &out)?;
    }
    Ok(EXIT_OK)
}

pub fn gen_data(args: &GenDataArgs) -> Result<u8> {
    create_dir(&args.out)?;
    match args.kind {
        DataKind::Logistic => {
            let k_true = args.k_true.context("--k-true is required for logistic data")?;
            let cfg = LogisticSimConfig {
                ar_rho: args.ar_rho,
                seed: args.seed,
                ..LogisticSimConfig::new(args.p, k_true, args.n)
            };
            let sample = gen_logistic(&cfg)?;
            let labeled = LabeledData {
                features: sample.data.features().clone(),
                labels: sample.data.labels().to_vec(),
            };
            write_file(&args.out, "data.libsvm", &libsvm(&labeled))?;
            write_file(&args.out, "w_true.csv", &vector_csv(&sample.w_true))?;
        }
        DataKind::Precision => {
            let cfg = PrecisionSimConfig {
                edge_prob: args.edge_prob,
                seed: args.seed,
                ..PrecisionSimConfig::new(args.p, args.n)
            };
            let sample = gen_precision(&cfg)?;
            write_file(&args.out, "samples.csv", &dense_csv(&sample.samples))?;
            write_file(&args.out, "covariance.csv", &dense_csv(&sample_covariance(&sample.samples)))?;
            write_file(&args.out, "precision_true.csv", &dense_csv(&sample.model.omega))?;
        }
        DataKind::LeastSquares => {
            let k_true = args.k_true.context("--k-true is required for least-squares data")?;
            let sample = gen_least_squares(args.n, args.p, k_true, args.noise, args.seed)?;
            let a = sample.model.design();
            let y = sample.model.observations();
            let joined = Matrix::from_fn(a.rows(), a.cols() + 1, |i, j| if j < a.cols() { a[(i, j)] } else { y[i] });
            write_file(&args.out, "design.csv", &dense_csv(&joined))?;
            write_file(&args.out, "x_true.csv", &vector_csv(&sample.x_true))?;
        }
    }
    println!("wrote {} data to {}", kind_name(args.kind), args.out.display());
    Ok(EXIT_OK)
}

fn kind_name(kind: DataKind) -> &'static str {
    match kind {
        DataKind::Logistic => "logistic",
        DataKind::Precision => "precision",
        DataKind::LeastSquares => "least-squares",
    }
}
