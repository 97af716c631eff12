//! Cardinality-constrained precision matrix estimation:
//!
//! `min −log det Ω + ⟨Σ_n, Ω⟩` s.t. `αI ⪯ Ω ⪯ βI`, at most `k` off-diagonal
//! pairs nonzero.

mod adm;
mod lda;

pub use adm::{adm_eigen_update, adm_solve, default_penalty, AdmConfig, AdmOutcome, BOX_TOL};
pub use lda::{lda_score, LdaModel, LdaScore};

use crate::error::{invalid, Result};
use crate::numerics::{dist2, hard_threshold, norm2, spectral_norm, sym_eigen, top_k_offdiag_pairs, Cholesky, Matrix, PairSupport};
use crate::solver::{IterationRecord, SolverConfig, SolverTrace, StepKind, Termination};

/// Default `ξ` in the eigenvalue box rule.
pub const DEFAULT_XI: f64 = 1e-2;

/// Sample covariance with the eigenvalue box `[α, β]` the estimate must
/// respect.
#[derive(Clone, Debug)]
pub struct LogDetProblem {
    cov: Matrix,
    n: usize,
    alpha: f64,
    beta: f64,
}

impl LogDetProblem {
    /// Box from [`estimate_box`] with parameter `xi`.
    pub fn new(cov: Matrix, n: usize, xi: f64) -> Result<Self> {
        check_covariance(&cov)?;
        let (alpha, beta) = estimate_box(&cov, n, xi)?;
        Ok(Self { cov, n, alpha, beta })
    }

    pub fn with_box(cov: Matrix, n: usize, alpha: f64, beta: f64) -> Result<Self> {
        check_covariance(&cov)?;
        if !(alpha > 0.0) || !(alpha <= beta) {
            return Err(invalid(format!("need 0 < alpha <= beta, got alpha = {alpha}, beta = {beta}")));
        }
        Ok(Self { cov, n, alpha, beta })
    }

    pub fn dim(&self) -> usize {
        self.cov.rows()
    }

    pub fn covariance(&self) -> &Matrix {
        &self.cov
    }

    pub fn samples(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

fn check_covariance(cov: &Matrix) -> Result<()> {
    cov.require_square("covariance")?;
    if cov.rows() == 0 {
        return Err(invalid("covariance must be non-empty"));
    }
    if !cov.is_symmetric(1e-12) {
        return Err(invalid("covariance is not symmetric"));
    }
    let e = sym_eigen(cov)?;
    if e.min() < -1e-10 * e.max().abs().max(1.0) {
        return Err(invalid(format!("covariance is not positive semidefinite (eigenvalue {:.3e})", e.min())));
    }
    Ok(())
}

/// `α = (‖Σ_n‖₂ + nξ)⁻¹`, `β = ξ⁻¹(n − α Tr Σ_n)`.
pub fn estimate_box(cov: &Matrix, n: usize, xi: f64) -> Result<(f64, f64)> {
    if !(xi > 0.0) {
        return Err(invalid(format!("xi must be positive, got {xi}")));
    }
    if n == 0 {
        return Err(invalid("sample count must be positive"));
    }
    let nf = n as f64;
    let alpha = 1.0 / (spectral_norm(cov)? + nf * xi);
    let beta = (nf - alpha * cov.trace()) / xi;
    if !(alpha <= beta) {
        return Err(invalid(format!("estimated box is empty: alpha = {alpha}, beta = {beta}")));
    }
    Ok((alpha, beta))
}

fn factor(omega: &Matrix) -> Result<Cholesky> {
    if !omega.is_square() || !omega.is_symmetric(1e-10) {
        return Err(invalid("precision matrix must be square and symmetric"));
    }
    Cholesky::new(omega).ok_or_else(|| invalid("precision matrix is not positive definite"))
}

/// `L(Ω) = −log det Ω + ⟨Σ, Ω⟩` for an arbitrary covariance `Σ`.
pub fn logdet_loss(cov: &Matrix, omega: &Matrix) -> Result<f64> {
    if cov.rows() != omega.rows() {
        return Err(invalid("covariance and precision dimensions differ"));
    }
    Ok(-factor(omega)?.log_det() + cov.inner(omega))
}

pub fn logdet_value(problem: &LogDetProblem, omega: &Matrix) -> Result<f64> {
    logdet_loss(&problem.cov, omega)
}

/// `∇L(Ω) = Σ_n − Ω⁻¹`
pub fn logdet_gradient(problem: &LogDetProblem, omega: &Matrix) -> Result<Matrix> {
    if problem.dim() != omega.rows() {
        return Err(invalid("covariance and precision dimensions differ"));
    }
    Ok(problem.cov.sub(&factor(omega)?.inverse()).symmetrize())
}

/// `‖(vect ∇L(Ω))_s‖`: norm of the `s` largest gradient entries.
pub fn restricted_gradient_norm(problem: &LogDetProblem, omega: &Matrix, s: usize) -> Result<f64> {
    let g = logdet_gradient(problem, omega)?;
    let (top, _) = hard_threshold(g.as_slice(), s)?;
    Ok(norm2(&top))
}

/// Whether `Ω̄ − αI` and `βI − Ω̄` are both diagonally dominant, the premise
/// under which the recovery rate carries over to [`modified_grahtp`].
pub fn box_diagonally_dominant(omega: &Matrix, alpha: f64, beta: f64) -> bool {
    (0..omega.rows()).all(|i| {
        let off: f64 = (0..omega.cols()).filter(|&j| j != i).map(|j| omega[(i, j)].abs()).sum();
        omega[(i, i)] - alpha >= off && beta - omega[(i, i)] >= off
    })
}

/// GraHTP adapted to the eigenvalue box: gradient step on `Ω`, selection of
/// the `cfg.k` largest off-diagonal pairs plus the diagonal, then the ADM
/// solve of the box- and support-constrained subproblem. Starts from `αI`.
///
/// With `halt_on_support_repeat`, the run also stops when the selected
/// support equals any earlier one, not just the previous one: the iterates
/// then cycle, and the best iterate of the cycle is returned.
pub fn modified_grahtp(
    problem: &LogDetProblem,
    cfg: &SolverConfig,
    adm: &AdmConfig,
) -> Result<(Matrix, SolverTrace<PairSupport>)> {
    if !(cfg.eta > 0.0) || !(cfg.rel_tol > 0.0) || cfg.max_iters == 0 {
        return Err(invalid("step size, tolerance and iteration cap must be positive"));
    }
    let p = problem.dim();
    let max_pairs = p * (p - 1) / 2;
    if cfg.k > max_pairs {
        return Err(invalid(format!("k = {} exceeds the {max_pairs} off-diagonal pairs", cfg.k)));
    }

    let mut omega = Matrix::identity(p).scale(problem.alpha);
    // every support solved so far with its solution and objective value
    let mut history: Vec<(PairSupport, Matrix, f64)> = Vec::new();
    let mut records = Vec::new();
    let mut termination = Termination::MaxIterations;

    for t in 1..=cfg.max_iters {
        let grad = logdet_gradient(problem, &omega)?;
        let stepped = omega.sub(&grad.scale(cfg.eta));
        let support = top_k_offdiag_pairs(&stepped, cfg.k)?;

        if cfg.halt_on_support_repeat {
            if let Some(first) = history.iter().position(|h| h.0 == support) {
                // The subproblem has a unique solution, so from here on the
                // iterates cycle through history[first..]; keep the best.
                let last = history.len() - 1;
                let (best, value) = history[first..]
                    .iter()
                    .min_by(|a, b| a.2.total_cmp(&b.2))
                    .map(|h| (h.1.clone(), h.2))
                    .expect("non-empty cycle");
                records.push(IterationRecord {
                    iteration: t,
                    support,
                    objective: value,
                    step_norm: dist2(best.as_slice(), omega.as_slice()),
                    iterate: cfg.record_iterates.then(|| best.as_slice().to_vec()),
                    inner_flagged: false,
                });
                termination = if first == last {
                    Termination::SupportRepeat
                } else {
                    Termination::SupportCycle
                };
                omega = best;
                break;
            }
        }

        let out = adm_solve(problem, &support, &omega, adm)?;
        let next = out.theta;
        let value = logdet_value(problem, &next)?;
        if !value.is_finite() {
            return Err(crate::Error::Diverged { iteration: t, value });
        }
        let step_norm = dist2(next.as_slice(), omega.as_slice());
        let relative = step_norm / omega.frobenius_norm();
        records.push(IterationRecord {
            iteration: t,
            support: support.clone(),
            objective: value,
            step_norm,
            iterate: cfg.record_iterates.then(|| next.as_slice().to_vec()),
            inner_flagged: !out.converged,
        });
        omega = next;
        history.push((support, omega.clone(), value));
        if relative <= cfg.rel_tol {
            termination = Termination::RelativeTolerance;
            break;
        }
    }

    Ok((
        omega,
        SolverTrace {
            step: StepKind::BoxDebias,
            records,
            termination,
        },
    ))
}

/// Box-constrained minimizer on the diagonal support; the comparison
/// baseline for the sparse estimates.
pub fn diagonal_estimate(problem: &LogDetProblem, adm: &AdmConfig) -> Result<Matrix> {
    let p = problem.dim();
    let start = Matrix::identity(p).scale(problem.alpha);
    Ok(adm_solve(problem, &PairSupport::diagonal(p), &start, adm)?.theta)
}
