//! GraHTP / FGraHTP iteration engines over an abstract [`Objective`].
//!
//! One iteration of either solver is
//!
//! 1. a full gradient step `x̃ = x − η ∇f(x)`,
//! 2. hard thresholding of `x̃` to its `k` largest entries, which fixes the
//!    support `F`,
//! 3. either a re-minimization of `f` over `supp(x) ⊆ F` (GraHTP) or plain
//!    truncation (FGraHTP).
//!
//! Iteration stops when GraHTP selects the same support twice in a row, when
//! the relative change `‖x⁽ᵗ⁾ − x⁽ᵗ⁻¹⁾‖ / ‖x⁽ᵗ⁻¹⁾‖` drops to `rel_tol`, or
//! after `max_iters` iterations.

mod condition;
mod quadratic;

pub use condition::{check_condition_c, estimate_condition, restricted_gradient_norm, ConditionEstimate};
pub use quadratic::Quadratic;

use crate::error::{check_dim, invalid, Error, Result};
use crate::numerics::{count_nonzero, dist2, hard_threshold, norm2, Matrix, SupportSet};

/// A smooth function driven by the solvers.
///
/// Implementations must be pure: the engines call these methods from a
/// single thread but never mutate the objective, so independent solves may
/// share one instance.
pub trait Objective {
    /// Number of coordinates `p`.
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Minimizes the objective over vectors supported on `support`, starting
    /// from `start`. The result must vanish outside `support`.
    fn debias(&self, support: &SupportSet, start: &[f64]) -> Result<Debiased>;

    /// Hessian restricted to `support × support` at `x`.
    ///
    /// The default takes central differences of the gradient.
    fn restricted_hessian(&self, support: &SupportSet, x: &[f64]) -> Matrix {
        let idx = support.indices();
        let s = idx.len();
        let mut h = Matrix::zeros(s, s);
        let mut probe = x.to_vec();
        for (c, &j) in idx.iter().enumerate() {
            let step = 1e-5 * x[j].abs().max(1.0);
            probe[j] = x[j] + step;
            let plus = self.gradient(&probe);
            probe[j] = x[j] - step;
            let minus = self.gradient(&probe);
            probe[j] = x[j];
            for (r, &i) in idx.iter().enumerate() {
                h[(r, c)] = (plus[i] - minus[i]) / (2.0 * step);
            }
        }
        h.symmetrize()
    }

    /// True when the Hessian does not depend on `x` (quadratic objectives).
    fn has_constant_curvature(&self) -> bool {
        false
    }
}

/// Output of a restricted minimization.
#[derive(Clone, Debug, PartialEq)]
pub struct Debiased {
    pub x: Vec<f64>,
    /// Set when the inner solve needed a fallback (ridge regularization,
    /// non-convergence).
    pub flagged: bool,
}

/// Parameters shared by every solver in the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Sparsity budget.
    pub k: usize,
    /// Gradient step size η.
    pub eta: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    /// Stop GraHTP (and the modified GraHTP) as soon as the selected support
    /// repeats. Ignored by FGraHTP, whose iterates can still move on a fixed
    /// support.
    pub halt_on_support_repeat: bool,
    /// Keep a copy of every iterate in the trace.
    pub record_iterates: bool,
    /// Seed for the randomized step-size heuristic.
    pub seed: u64,
}

impl SolverConfig {
    pub const DEFAULT_MAX_ITERS: usize = 500;
    pub const DEFAULT_REL_TOL: f64 = 1e-4;

    pub fn new(k: usize, eta: f64) -> Self {
        Self {
            k,
            eta,
            max_iters: Self::DEFAULT_MAX_ITERS,
            rel_tol: Self::DEFAULT_REL_TOL,
            halt_on_support_repeat: true,
            record_iterates: false,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("sparsity k must be at least 1"));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(invalid(format!("step size must be positive, got {}", self.eta)));
        }
        if !(self.rel_tol > 0.0) {
            return Err(invalid(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Why a solver stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    SupportRepeat,
    /// The selected support equals one chosen before the previous
    /// iteration (modified GraHTP only).
    SupportCycle,
    RelativeTolerance,
    MaxIterations,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::SupportRepeat => "support-repeat",
            Termination::SupportCycle => "support-cycle",
            Termination::RelativeTolerance => "rel-tol",
            Termination::MaxIterations => "max-iters",
        }
    }
}

/// How the third step of an iteration produced the new iterate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Restricted minimization over the selected support.
    Debias,
    /// Truncation to the selected support.
    Truncate,
    /// Restricted minimization under the eigenvalue box as well.
    BoxDebias,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Debias => "debias",
            StepKind::Truncate => "truncate",
            StepKind::BoxDebias => "box-debias",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord<S> {
    /// 1-based iteration counter.
    pub iteration: usize,
    pub support: S,
    pub objective: f64,
    /// `‖x⁽ᵗ⁾ − x⁽ᵗ⁻¹⁾‖`
    pub step_norm: f64,
    /// Flattened iterate, only with `record_iterates`.
    pub iterate: Option<Vec<f64>>,
    /// The inner solve of this iteration raised its fallback flag.
    pub inner_flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverTrace<S = SupportSet> {
    pub step: StepKind,
    pub records: Vec<IterationRecord<S>>,
    pub termination: Termination,
}

impl<S> SolverTrace<S> {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn objective_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.records.last().map(|r| r.objective)
    }

    pub fn any_inner_flagged(&self) -> bool {
        self.records.iter().any(|r| r.inner_flagged)
    }

    /// Recorded iterates (empty unless `record_iterates` was set).
    pub fn iterates(&self) -> Vec<&[f64]> {
        self.records.iter().filter_map(|r| r.iterate.as_deref()).collect()
    }
}

/// Gradient hard thresholding pursuit.
pub fn grahtp<O: Objective + ?Sized>(obj: &O, cfg: &SolverConfig, x0: &[f64]) -> Result<(Vec<f64>, SolverTrace)> {
    run(obj, cfg, x0, StepKind::Debias)
}

/// Fast GraHTP: gradient step followed by truncation only.
pub fn fgrahtp<O: Objective + ?Sized>(obj: &O, cfg: &SolverConfig, x0: &[f64]) -> Result<(Vec<f64>, SolverTrace)> {
    run(obj, cfg, x0, StepKind::Truncate)
}

fn run<O: Objective + ?Sized>(
    obj: &O,
    cfg: &SolverConfig,
    x0: &[f64],
    step: StepKind,
) -> Result<(Vec<f64>, SolverTrace)> {
    cfg.validate()?;
    let p = obj.dim();
    check_dim(p, x0.len())?;
    if cfg.k > p {
        return Err(invalid(format!("k = {} exceeds dimension {p}", cfg.k)));
    }
    if count_nonzero(x0) > cfg.k {
        return Err(invalid(format!("initial point has more than k = {} nonzeros", cfg.k)));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(invalid("initial point has non-finite entries"));
    }

    let debias = step == StepKind::Debias;
    let mut x = x0.to_vec();
    let mut previous: Option<SupportSet> = None;
    let mut records = Vec::new();
    let mut termination = Termination::MaxIterations;

    for t in 1..=cfg.max_iters {
        let g = obj.gradient(&x);
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                iteration: t,
                value: f64::NAN,
            });
        }
        let stepped: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - cfg.eta * gi).collect();
        let (truncated, support) = hard_threshold(&stepped, cfg.k)?;

        if debias && cfg.halt_on_support_repeat && previous.as_ref() == Some(&support) {
            // Same support: the restricted minimizer is the current iterate.
            records.push(IterationRecord {
                iteration: t,
                support,
                objective: obj.value(&x),
                step_norm: 0.0,
                iterate: cfg.record_iterates.then(|| x.clone()),
                inner_flagged: false,
            });
            termination = Termination::SupportRepeat;
            break;
        }

        let (next, flagged) = if debias {
            let d = obj.debias(&support, &truncated)?;
            (d.x, d.flagged)
        } else {
            (truncated, false)
        };
        let value = obj.value(&next);
        if !value.is_finite() {
            return Err(Error::Diverged { iteration: t, value });
        }
        let step_norm = dist2(&next, &x);
        let prev_norm = norm2(&x);
        records.push(IterationRecord {
            iteration: t,
            support: support.clone(),
            objective: value,
            step_norm,
            iterate: cfg.record_iterates.then(|| next.clone()),
            inner_flagged: flagged,
        });
        x = next;
        previous = Some(support);

        let relative = if prev_norm > 0.0 {
            step_norm / prev_norm
        } else if step_norm == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if relative <= cfg.rel_tol {
            termination = Termination::RelativeTolerance;
            break;
        }
    }

    Ok((x, SolverTrace { step, records, termination }))
}

/// Step size `1 / M̂₂ₖ` from an empirical restricted smoothness estimate.
pub fn default_step_size<O: Objective + ?Sized>(obj: &O, k: usize, seed: u64) -> Result<f64> {
    let s = (2 * k).min(obj.dim());
    let est = estimate_condition(obj, s, condition::DEFAULT_SUPPORT_TRIALS, seed)?;
    if !(est.max_curvature > 0.0) {
        return Err(invalid("restricted smoothness estimate is not positive"));
    }
    Ok(1.0 / est.max_curvature)
}
