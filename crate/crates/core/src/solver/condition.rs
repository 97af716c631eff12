//! Empirical restricted strong convexity / smoothness and the contraction
//! condition `‖x − y − ζ(∇_F f(x) − ∇_F f(y))‖ ≤ ρ_s ‖x − y‖`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, invalid, Result};
use crate::numerics::{hard_threshold, norm2, sym_eigenvalues, SupportSet};
use crate::solver::Objective;

pub(crate) const DEFAULT_SUPPORT_TRIALS: usize = 64;
const POINTS_PER_SUPPORT: usize = 16;

/// Restricted curvature bounds over supports of size `s`, with the
/// contraction constants they imply.
///
/// These are sampled estimates, not certificates: the true `m_s` can be
/// smaller and the true `M_s` larger than reported.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionEstimate {
    pub s: usize,
    /// Smallest restricted Hessian eigenvalue seen (`m_s`).
    pub min_curvature: f64,
    /// Largest restricted Hessian eigenvalue seen (`M_s`).
    pub max_curvature: f64,
    /// `ζ = m_s / M_s²`, the midpoint of the admissible range `(0, 2 m_s / M_s²)`.
    pub zeta: f64,
    /// `ρ_s = sqrt(1 − 2ζ m_s + ζ² M_s²)`; 1 when curvature is not positive.
    pub rho: f64,
    /// Step size the rates below refer to (defaults to `1 / M_s`).
    pub eta: f64,
    /// GraHTP shrinkage rate `√2 (1 − η/ζ + (2 − η/ζ) ρ) / (1 − ρ)`.
    pub mu1: f64,
    /// FGraHTP shrinkage rate `2 (1 − η/ζ + (2 − η/ζ) ρ)`.
    pub mu2: f64,
    /// Some sampled restricted Hessian had a non-positive eigenvalue.
    pub negative_curvature: bool,
    pub supports_sampled: usize,
    /// Every support of size `s` was visited.
    pub exhaustive: bool,
}

impl ConditionEstimate {
    pub fn from_curvature(s: usize, m: f64, big_m: f64) -> Self {
        let negative = !(m > 0.0);
        let mut est = Self {
            s,
            min_curvature: m,
            max_curvature: big_m,
            zeta: 0.0,
            rho: 1.0,
            eta: if big_m > 0.0 { 1.0 / big_m } else { f64::NAN },
            mu1: f64::INFINITY,
            mu2: f64::INFINITY,
            negative_curvature: negative,
            supports_sampled: 0,
            exhaustive: false,
        };
        if !negative {
            est = est.with_zeta(m / (big_m * big_m));
        }
        est
    }

    /// Recomputes `ρ_s` and the rates for a different `ζ`.
    pub fn with_zeta(mut self, zeta: f64) -> Self {
        self.zeta = zeta;
        self.rho = contraction_factor(zeta, self.min_curvature, self.max_curvature);
        let eta = self.eta;
        self.with_step(eta)
    }

    /// Recomputes `μ1`, `μ2` for step size `eta`.
    pub fn with_step(mut self, eta: f64) -> Self {
        self.eta = eta;
        let (mu1, mu2) = shrinkage_rates(eta, self.zeta, self.rho);
        self.mu1 = mu1;
        self.mu2 = mu2;
        self
    }

    /// Largest `ζ` admitted by the curvature bounds, `2 m_s / M_s²`.
    pub fn zeta_max(&self) -> f64 {
        2.0 * self.min_curvature / (self.max_curvature * self.max_curvature)
    }

    /// `0.9 ζ / (1 + ρ)`: inside the regime where GraHTP descends
    /// monotonically and stops after finitely many iterations.
    pub fn safe_step(&self) -> f64 {
        0.9 * self.zeta / (1.0 + self.rho)
    }
}

/// `sqrt(1 − 2ζm + ζ²M²)`
pub fn contraction_factor(zeta: f64, m: f64, big_m: f64) -> f64 {
    (1.0 - 2.0 * zeta * m + zeta * zeta * big_m * big_m).max(0.0).sqrt()
}

/// `(μ1, μ2)` for step `eta` under condition `C(s, ζ, ρ)`.
pub fn shrinkage_rates(eta: f64, zeta: f64, rho: f64) -> (f64, f64) {
    if !(zeta > 0.0) || !(rho < 1.0) {
        return (f64::INFINITY, f64::INFINITY);
    }
    let r = eta / zeta;
    let core = 1.0 - r + (2.0 - r) * rho;
    (std::f64::consts::SQRT_2 * core / (1.0 - rho), 2.0 * core)
}

/// Estimates `m_s`, `M_s` from restricted Hessian spectra.
///
/// `trials` random supports of size `s` are drawn (every support, when there
/// are no more than `trials` of them). On each, the restricted Hessian is
/// evaluated at 16 points drawn uniformly from `[−1, 1]` on the support, or
/// once when the objective has constant curvature.
pub fn estimate_condition<O: Objective + ?Sized>(
    obj: &O,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<ConditionEstimate> {
    let p = obj.dim();
    if s == 0 || s > p {
        return Err(invalid(format!("support size s = {s} must be in 1..={p}")));
    }
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exhaustive = binomial_at_most(p, s, trials);
    let supports: Vec<SupportSet> = if exhaustive {
        all_subsets(p, s)
    } else {
        (0..trials)
            .map(|_| SupportSet::new(index::sample(&mut rng, p, s).into_vec(), p))
            .collect::<Result<_>>()?
    };
    let points = if obj.has_constant_curvature() { 1 } else { POINTS_PER_SUPPORT };

    let mut m = f64::INFINITY;
    let mut big_m = f64::NEG_INFINITY;
    let mut x = vec![0.0; p];
    for support in &supports {
        for _ in 0..points {
            x.iter_mut().for_each(|v| *v = 0.0);
            for i in support.iter() {
                x[i] = rng.gen_range(-1.0..=1.0);
            }
            let h = obj.restricted_hessian(support, &x);
            let eig = sym_eigenvalues(&h)?;
            m = m.min(eig[eig.len() - 1]);
            big_m = big_m.max(eig[0]);
        }
    }
    let mut est = ConditionEstimate::from_curvature(s, m, big_m);
    est.supports_sampled = supports.len();
    est.exhaustive = exhaustive;
    Ok(est)
}

/// Observed contraction ratio
/// `‖x − y − ζ ∇_F f(x) + ζ ∇_F f(y)‖ / ‖x − y‖` for `x, y` supported on `F`.
pub fn check_condition_c<O: Objective + ?Sized>(
    obj: &O,
    support: &SupportSet,
    x: &[f64],
    y: &[f64],
    zeta: f64,
) -> Result<f64> {
    let p = obj.dim();
    check_dim(p, x.len())?;
    check_dim(p, y.len())?;
    let outside = |v: &[f64]| v.iter().enumerate().any(|(i, vi)| *vi != 0.0 && !support.contains(i));
    if outside(x) || outside(y) {
        return Err(invalid("points must be supported on F"));
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let denom = norm2(&diff);
    if denom == 0.0 {
        return Err(invalid("condition check needs x != y"));
    }
    let gx = obj.gradient(x);
    let gy = obj.gradient(y);
    let mut r = diff;
    for i in support.iter() {
        r[i] -= zeta * (gx[i] - gy[i]);
    }
    Ok(norm2(&r) / denom)
}

/// `‖∇_s f(x)‖`: norm of the `s` largest-magnitude gradient entries.
pub fn restricted_gradient_norm<O: Objective + ?Sized>(obj: &O, x: &[f64], s: usize) -> Result<f64> {
    let g = obj.gradient(x);
    let (top, _) = hard_threshold(&g, s)?;
    Ok(norm2(&top))
}

fn binomial_at_most(n: usize, k: usize, limit: usize) -> bool {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > limit as u128 {
            return false;
        }
    }
    true
}

fn all_subsets(n: usize, k: usize) -> Vec<SupportSet> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(SupportSet::new(idx.clone(), n).expect("valid subset"));
        // advance to the next combination in lexicographic order
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use crate::solver::Quadratic;

    fn diag124() -> Quadratic {
        Quadratic::new(Matrix::from_diag(&[1.0, 2.0, 4.0]), vec![0.0; 3]).unwrap()
    }

    #[test]
    fn diagonal_quadratic_extremes() {
        let est = estimate_condition(&diag124(), 2, 64, 1).unwrap();
        assert!(est.exhaustive);
        assert_eq!(est.supports_sampled, 3);
        assert!((est.min_curvature - 1.0).abs() < 1e-12);
        assert!((est.max_curvature - 4.0).abs() < 1e-12);
        assert!(!est.negative_curvature);
    }

    #[test]
    fn contraction_factor_substitution() {
        let est = ConditionEstimate::from_curvature(2, 1.0, 4.0).with_zeta(0.1);
        assert!((est.rho - 0.96f64.sqrt()).abs() < 1e-15);
        assert!((est.rho - 0.9798).abs() < 1e-4);
        let mid = ConditionEstimate::from_curvature(2, 1.0, 4.0);
        assert!((mid.zeta - 1.0 / 16.0).abs() < 1e-15);
        assert!((mid.zeta_max() - 2.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_condition_ratios() {
        let f = diag124();
        let s0 = SupportSet::new(vec![0], 3).unwrap();
        let r = check_condition_c(&f, &s0, &[1.0, 0.0, 0.0], &[-0.5, 0.0, 0.0], 1.0).unwrap();
        assert!(r.abs() < 1e-15);
        let s2 = SupportSet::new(vec![2], 3).unwrap();
        let r = check_condition_c(&f, &s2, &[0.0, 0.0, 2.0], &[0.0, 0.0, 1.0], 0.1).unwrap();
        assert!((r - 0.6).abs() < 1e-12);
    }

    #[test]
    fn condition_check_errors() {
        let f = diag124();
        let s0 = SupportSet::new(vec![0], 3).unwrap();
        assert!(check_condition_c(&f, &s0, &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 1.0).is_err());
        assert!(check_condition_c(&f, &s0, &[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn indefinite_curvature_is_reported() {
        let q = Quadratic::new(Matrix::from_diag(&[1.0, -2.0]), vec![0.0; 2]).unwrap();
        let est = estimate_condition(&q, 1, 8, 0).unwrap();
        assert!(est.negative_curvature);
        assert_eq!(est.rho, 1.0);
        assert!(est.mu1.is_infinite());
    }

    #[test]
    fn random_supports_when_not_exhaustive() {
        let q = Quadratic::new(Matrix::from_diag(&(1..=20).map(f64::from).collect::<Vec<_>>()), vec![0.0; 20])
            .unwrap();
        let est = estimate_condition(&q, 5, 10, 3).unwrap();
        assert!(!est.exhaustive);
        assert_eq!(est.supports_sampled, 10);
        assert!(est.min_curvature >= 1.0 && est.max_curvature <= 20.0);
    }

    #[test]
    fn subsets_enumeration() {
        let all = all_subsets(5, 3);
        assert_eq!(all.len(), 10);
        assert_eq!(all[0].indices(), &[0, 1, 2]);
        assert_eq!(all[9].indices(), &[2, 3, 4]);
        assert!(binomial_at_most(5, 3, 10));
        assert!(!binomial_at_most(5, 3, 9));
    }

    #[test]
    fn rates_formulas() {
        let (mu1, mu2) = shrinkage_rates(1.0, 1.0, 0.1);
        assert!((mu1 - std::f64::consts::SQRT_2 * 0.1 / 0.9).abs() < 1e-15);
        assert!((mu2 - 0.2).abs() < 1e-15);
    }
}
