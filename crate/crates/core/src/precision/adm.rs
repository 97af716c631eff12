//! Alternating direction method for
//! `min L(Ω)` s.t. `αI ⪯ Ω ⪯ βI`, `supp(Ω) ⊆ F`.
//!
//! The splitting `Ω = Θ` with multiplier `Γ` and penalty `ρ` alternates
//!
//! * `Ω ← argmin_{αI⪯Ω⪯βI} ½‖Ω − M‖²_F − (1/ρ) log det Ω` with
//!   `M = Θ − (Σ_n − Γ)/ρ`, solved eigenvalue by eigenvalue,
//! * `Θ ← [Ω − Γ/ρ]_F`,
//! * `Γ ← Γ − ρ(Ω − Θ)`.

use crate::error::{invalid, Result};
use crate::numerics::{sym_eigen, sym_eigen_from, Matrix, PairSupport};
use crate::precision::{logdet_gradient, LogDetProblem};

/// Box violations below this are tolerated in the returned matrix.
pub const BOX_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct AdmConfig {
    /// Penalty parameter ρ; `None` selects [`default_penalty`].
    pub rho: Option<f64>,
    /// Converged when both residuals are at most `tol_per_dim · p`.
    pub tol_per_dim: f64,
    pub max_sweeps: usize,
}

impl Default for AdmConfig {
    fn default() -> Self {
        Self {
            rho: None,
            tol_per_dim: 1e-6,
            max_sweeps: 500,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdmOutcome {
    /// Support-feasible solution `Θ`.
    pub theta: Matrix,
    pub sweeps: usize,
    pub converged: bool,
    /// `‖Ω − Θ‖_F` at the last sweep.
    pub primal_residual: f64,
    /// `ρ‖Θ⁽ᵗ⁺¹⁾ − Θ⁽ᵗ⁾‖_F` at the last sweep.
    pub dual_residual: f64,
    /// The final `Θ` left the eigenvalue box and was pulled back in.
    pub box_repaired: bool,
}

/// `(Tr Σ_n / p)²`: the mean eigenvalue of `Σ_n ⊗ Σ_n`, the curvature of the
/// loss near `Σ_n⁻¹`. Matching the penalty to that curvature keeps the sweep
/// count insensitive to the scale of the data. Falls back to 1 for a zero
/// covariance.
pub fn default_penalty(problem: &LogDetProblem) -> f64 {
    let mean = problem.covariance().trace() / problem.dim() as f64;
    if mean > 0.0 {
        mean * mean
    } else {
        1.0
    }
}

/// `min{β, max{α, (λ + sqrt(λ² + 4/ρ))/2}}`: minimizer of
/// `½(x − λ)² − (1/ρ) log x` over `[α, β]`.
pub fn adm_eigen_update(lambda: f64, rho: f64, alpha: f64, beta: f64) -> f64 {
    let root = 0.5 * (lambda + (lambda * lambda + 4.0 / rho).sqrt());
    root.max(alpha).min(beta)
}

/// Solves the box- and support-constrained log-det subproblem from the
/// starting point `omega0`: `Θ⁽⁰⁾ = Ω⁽⁰⁾`, and `Γ⁽⁰⁾` is the part of
/// `∇L(Ω⁽⁰⁾)` off the support.
pub fn adm_solve(problem: &LogDetProblem, support: &PairSupport, omega0: &Matrix, cfg: &AdmConfig) -> Result<AdmOutcome> {
    let p = problem.dim();
    if support.dim() != p || omega0.rows() != p || omega0.cols() != p {
        return Err(invalid("support, start and covariance dimensions differ"));
    }
    let rho = cfg.rho.unwrap_or_else(|| default_penalty(problem));
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(invalid(format!("ADM penalty must be positive, got {rho}")));
    }
    let (alpha, beta) = (problem.alpha(), problem.beta());
    let tol = cfg.tol_per_dim * p as f64;
    let cov = problem.covariance();

    let mut theta = omega0.symmetrize();
    // At the fixed point Γ vanishes on F and equals ∇L(Ω) off F; seeding it
    // from the start matrix saves most sweeps when that start is a nearby
    // solution.
    let mut gamma = match logdet_gradient(problem, &theta) {
        Ok(g) => g.sub(&support.project(&g)),
        Err(_) => Matrix::zeros(p, p),
    };
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut sweeps = 0;
    let mut converged = false;

    let mut basis: Option<Matrix> = None;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let m = theta.sub(&cov.sub(&gamma).scale(1.0 / rho));
        // M drifts slowly between sweeps, so the last eigenbasis is a good start
        let eig = match &basis {
            Some(b) => sym_eigen_from(&m, b)?,
            None => sym_eigen(&m)?,
        };
        let omega = eig.reconstruct_with(|l| adm_eigen_update(l, rho, alpha, beta));
        basis = Some(eig.vectors);
        let next_theta = support.project(&omega.sub(&gamma.scale(1.0 / rho)));
        let gap = omega.sub(&next_theta);
        gamma = gamma.sub(&gap.scale(rho));
        primal = gap.frobenius_norm();
        dual = rho * next_theta.sub(&theta).frobenius_norm();
        theta = next_theta;
        if primal.max(dual) <= tol {
            converged = true;
            break;
        }
    }

    let (theta, box_repaired) = repair_box(&theta, alpha, beta)?;
    Ok(AdmOutcome {
        theta,
        sweeps,
        converged,
        primal_residual: primal,
        dual_residual: dual,
        box_repaired,
    })
}

/// Maps the spectrum of `theta` back into `[α, β]` with an affine map
/// `aΘ + bI` when it strays more than [`BOX_TOL`] outside. The diagonal is
/// always in the support, so the map keeps the support intact.
fn repair_box(theta: &Matrix, alpha: f64, beta: f64) -> Result<(Matrix, bool)> {
    let eig = sym_eigen(theta)?;
    let (lo, hi) = (eig.min(), eig.max());
    if lo >= alpha - BOX_TOL && hi <= beta + BOX_TOL {
        return Ok((theta.clone(), false));
    }
    let new_lo = lo.max(alpha);
    let new_hi = hi.min(beta).max(new_lo);
    let (a, b) = if hi - lo > 0.0 {
        let a = (new_hi - new_lo) / (hi - lo);
        (a, new_lo - a * lo)
    } else {
        (1.0, new_lo - lo)
    };
    let mut out = theta.scale(a);
    for i in 0..out.rows() {
        out[(i, i)] += b;
    }
    Ok((out, true))
}
