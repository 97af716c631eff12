//! ℓ2-regularized logistic regression
//! `f(w) = (1/n) Σ log(1 + exp(−2 v⁽ⁱ⁾ wᵀu⁽ⁱ⁾)) + (λ/2)‖w‖²`
//! with labels `v⁽ⁱ⁾ ∈ {−1, +1}`.

use crate::error::{check_dim, invalid, Result};
use crate::numerics::{axpy, dot, hard_threshold, norm2, Cholesky, Matrix, SupportSet};
use crate::solver::{restricted_gradient_norm, Debiased, Objective};

/// `σ(z)` saturates in double precision beyond this magnitude.
const SIGMOID_CLAMP: f64 = 36.0;

const NEWTON_TOL: f64 = 1e-8;
const NEWTON_MAX_ITERS: usize = 100;
const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// Samples stored row-wise (`features` is n × p, row `i` is `u⁽ⁱ⁾`).
#[derive(Clone, Debug)]
pub struct LogisticData {
    features: Matrix,
    labels: Vec<f64>,
    lambda: f64,
}

impl LogisticData {
    pub fn new(features: Matrix, labels: Vec<f64>, lambda: f64) -> Result<Self> {
        if features.rows() == 0 {
            return Err(invalid("logistic data needs at least one sample"));
        }
        check_dim(features.rows(), labels.len())?;
        if labels.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(invalid("labels must be -1 or +1"));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(invalid(format!("lambda must be non-negative, got {lambda}")));
        }
        if !features.is_finite() {
            return Err(invalid("features must be finite"));
        }
        Ok(Self {
            features,
            labels,
            lambda,
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn samples(&self) -> usize {
        self.labels.len()
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.features.clone(), self.labels.clone(), lambda)
    }

    /// `zᵢ = 2 vᵢ wᵀuᵢ`
    fn margins(&self, w: &[f64]) -> Vec<f64> {
        (0..self.samples())
            .map(|i| 2.0 * self.labels[i] * dot(self.features.row(i), w))
            .collect()
    }

    /// Unregularized loss `l(w)`.
    pub fn loss(&self, w: &[f64]) -> f64 {
        let n = self.samples() as f64;
        self.margins(w).iter().map(|&z| softplus(-z)).sum::<f64>() / n
    }

    /// `[a(w)]ᵢ = −2vᵢ(1 − σ(2vᵢ wᵀuᵢ))`
    pub fn coefficients(&self, w: &[f64]) -> Vec<f64> {
        self.margins(w)
            .iter()
            .zip(&self.labels)
            .map(|(&z, &v)| -2.0 * v * sigmoid(-z))
            .collect()
    }

    /// Fraction of samples whose sign prediction disagrees with the label.
    pub fn error_rate(&self, w: &[f64]) -> f64 {
        let wrong = self.margins(w).iter().filter(|&&z| z <= 0.0).count();
        wrong as f64 / self.samples() as f64
    }
}

/// `log(1 + eᵗ)` without overflow.
pub fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= SIGMOID_CLAMP {
        1.0
    } else if z <= -SIGMOID_CLAMP {
        z.exp()
    } else {
        1.0 / (1.0 + (-z).exp())
    }
}

impl Objective for LogisticData {
    fn dim(&self) -> usize {
        self.features.cols()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.loss(w) + 0.5 * self.lambda * dot(w, w)
    }

    /// `U a(w) / n + λw`
    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let n = self.samples() as f64;
        let a = self.coefficients(w);
        let mut g: Vec<f64> = w.iter().map(|wi| self.lambda * wi).collect();
        for (i, ai) in a.iter().enumerate() {
            axpy(ai / n, self.features.row(i), &mut g);
        }
        g
    }

    fn debias(&self, support: &SupportSet, start: &[f64]) -> Result<Debiased> {
        logistic_debias(self, support, start)
    }

    /// `(1/n) Σ 4σ(zᵢ)σ(−zᵢ) uᵢ,F uᵢ,Fᵀ + λI`
    fn restricted_hessian(&self, support: &SupportSet, w: &[f64]) -> Matrix {
        let idx = support.indices();
        let s = idx.len();
        let n = self.samples() as f64;
        let mut h = Matrix::identity(s).scale(self.lambda);
        let mut uf = vec![0.0; s];
        for (i, z) in self.margins(w).iter().enumerate() {
            let weight = 4.0 * sigmoid(*z) * sigmoid(-z) / n;
            if weight == 0.0 {
                continue;
            }
            let row = self.features.row(i);
            for (u, &j) in uf.iter_mut().zip(idx) {
                *u = row[j];
            }
            for a in 0..s {
                let wa = weight * uf[a];
                if wa == 0.0 {
                    continue;
                }
                for (hb, ub) in h.row_mut(a)[a..].iter_mut().zip(&uf[a..]) {
                    *hb += wa * ub;
                }
            }
        }
        for a in 0..s {
            for b in 0..a {
                h[(a, b)] = h[(b, a)];
            }
        }
        h
    }
}

pub fn logistic_value(d: &LogisticData, w: &[f64]) -> Result<f64> {
    check_dim(d.dim(), w.len())?;
    Ok(d.value(w))
}

pub fn logistic_gradient(d: &LogisticData, w: &[f64]) -> Result<Vec<f64>> {
    check_dim(d.dim(), w.len())?;
    Ok(d.gradient(w))
}

/// Minimizes `f` over `supp(w) ⊆ F` by damped Newton on the restricted
/// coordinates (Armijo backtracking, halving), falling back to a gradient
/// step when the restricted Hessian cannot be factorized.
///
/// Stops once `‖∇_F f(w)‖ ≤ 1e-8 · max(1, ‖∇f(w0)‖)`. If that does not
/// happen within 100 Newton steps the best iterate is returned flagged.
pub fn logistic_debias(d: &LogisticData, support: &SupportSet, start: &[f64]) -> Result<Debiased> {
    let p = d.dim();
    check_dim(p, start.len())?;
    if support.is_empty() {
        return Err(invalid("debias support must be non-empty"));
    }
    let tol = NEWTON_TOL * norm2(&d.gradient(start)).max(1.0);
    let mut w = support.restrict(start);
    let mut f = d.value(&w);

    for _ in 0..NEWTON_MAX_ITERS {
        let g = support.gather(&d.gradient(&w));
        let gnorm = norm2(&g);
        if gnorm <= tol {
            return Ok(Debiased { x: w, flagged: false });
        }
        let h = d.restricted_hessian(support, &w);
        let dir: Vec<f64> = match Cholesky::new(&h) {
            Some(c) => c.solve(&g).into_iter().map(|v| -v).collect(),
            None => g.iter().map(|v| -v).collect(),
        };
        let slope = dot(&g, &dir);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = moved(&w, support, &dir, step);
            let ft = d.value(&trial);
            if ft <= f + ARMIJO_C * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((next, fnext)) => {
                w = next;
                f = fnext;
            }
            None => {
                // No measurable decrease left: keep a full step only if it
                // still shrinks the restricted gradient.
                let trial = moved(&w, support, &dir, 1.0);
                if norm2(&support.gather(&d.gradient(&trial))) < gnorm {
                    f = d.value(&trial);
                    w = trial;
                } else {
                    break;
                }
            }
        }
    }
    let converged = norm2(&support.gather(&d.gradient(&w))) <= tol;
    Ok(Debiased {
        x: w,
        flagged: !converged,
    })
}

fn moved(w: &[f64], support: &SupportSet, dir: &[f64], step: f64) -> Vec<f64> {
    let mut out = w.to_vec();
    for (j, dj) in support.iter().zip(dir) {
        out[j] += step * dj;
    }
    out
}

/// Constants under which the regularized loss satisfies the contraction
/// condition on supports of size `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Prop1Constants {
    /// `R_s = maxᵢ max_{|F| ≤ s} ‖(u⁽ⁱ⁾)_F‖`
    pub r_s: f64,
    /// `ζ = λ / (4√s R_s² + λ)²`, half the admissible maximum.
    pub zeta: f64,
    /// `ρ_s = sqrt(1 − 2ζλ + ζ²(4√s R_s² + λ)²)`
    pub rho: f64,
}

impl Prop1Constants {
    pub fn zeta_max(&self, s: usize, lambda: f64) -> f64 {
        let l = 4.0 * (s as f64).sqrt() * self.r_s * self.r_s + lambda;
        2.0 * lambda / (l * l)
    }
}

/// Largest norm of any sample restricted to `s` coordinates (the top-`s`
/// magnitudes of each sample).
pub fn max_restricted_sample_norm(d: &LogisticData, s: usize) -> Result<f64> {
    let p = d.dim();
    if s == 0 || s > p {
        return Err(invalid(format!("s = {s} must be in 1..={p}")));
    }
    let mut r: f64 = 0.0;
    for i in 0..d.samples() {
        let (top, _) = hard_threshold(d.features.row(i), s)?;
        r = r.max(norm2(&top));
    }
    Ok(r)
}

pub fn prop1_constants(d: &LogisticData, s: usize) -> Result<Prop1Constants> {
    if d.lambda == 0.0 {
        return Err(invalid("the contraction constants are vacuous for lambda = 0"));
    }
    let r_s = max_restricted_sample_norm(d, s)?;
    Ok(constants_from_radius(r_s, s, d.lambda))
}

pub fn constants_from_radius(r_s: f64, s: usize, lambda: f64) -> Prop1Constants {
    let l = 4.0 * (s as f64).sqrt() * r_s * r_s + lambda;
    let zeta = lambda / (l * l);
    let rho = (1.0 - 2.0 * zeta * lambda + zeta * zeta * l * l).max(0.0).sqrt();
    Prop1Constants { r_s, zeta, rho }
}

/// Contraction constants plus, given a reference parameter `w̄`, the measured
/// error-floor quantity `‖∇_s f(w̄)‖` and its ridge part `λ‖w̄_s‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticDiagnostics {
    pub s: usize,
    pub constants: Prop1Constants,
    pub gradient_norm: Option<f64>,
    pub ridge_term: Option<f64>,
}

pub fn diagnostics(d: &LogisticData, s: usize, reference: Option<&[f64]>) -> Result<LogisticDiagnostics> {
    let constants = prop1_constants(d, s)?;
    let (gradient_norm, ridge_term) = match reference {
        Some(w) => {
            check_dim(d.dim(), w.len())?;
            let (top, _) = hard_threshold(w, s)?;
            (
                Some(restricted_gradient_norm(d, w, s)?),
                Some(d.lambda * norm2(&top)),
            )
        }
        None => (None, None),
    };
    Ok(LogisticDiagnostics {
        s,
        constants,
        gradient_norm,
        ridge_term,
    })
}
