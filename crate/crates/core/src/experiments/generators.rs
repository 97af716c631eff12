//! Synthetic problem instances.

use rand::seq::index;
use rand::Rng;

use super::rng::{normal_vec, sim_rng, standard_normal, SimRng};
use crate::error::{invalid, Error, Result};
use crate::least_squares::LinearModel;
use crate::logistic::{sigmoid, LogisticData};
use crate::numerics::{dot, sym_eigen, Matrix};

/// Logistic regression with AR(1) features.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticSimConfig {
    pub p: usize,
    /// Nonzeros in the true weight vector.
    pub k_true: usize,
    pub n: usize,
    /// Correlation between neighbouring features.
    pub ar_rho: f64,
    pub lambda: f64,
    pub replications: usize,
    pub seed: u64,
}

impl LogisticSimConfig {
    pub fn new(p: usize, k_true: usize, n: usize) -> Self {
        Self {
            p,
            k_true,
            n,
            ar_rho: 0.5,
            lambda: 1e-4,
            replications: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n == 0 {
            return Err(invalid("p and n must be positive"));
        }
        if self.k_true == 0 || self.k_true > self.p {
            return Err(invalid(format!("true sparsity {} must lie in [1, p = {}]", self.k_true, self.p)));
        }
        if !(0.0..1.0).contains(&self.ar_rho) {
            return Err(invalid(format!("AR correlation must lie in [0, 1), got {}", self.ar_rho)));
        }
        if !(self.lambda >= 0.0) {
            return Err(invalid(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LogisticSample {
    pub data: LogisticData,
    pub w_true: Vec<f64>,
}

/// `k_true` standard normal weights at uniformly random positions.
pub fn sparse_normal_vector(rng: &mut SimRng, p: usize, k: usize) -> Vec<f64> {
    let mut positions = index::sample(rng, p, k).into_vec();
    positions.sort_unstable();
    let mut w = vec![0.0; p];
    for i in positions {
        w[i] = standard_normal(rng);
    }
    w
}

/// Rows of `[u]_{j+1} = ρ[u]_j + sqrt(1 − ρ²) a_j` with `[u]_0, a_j ~ N(0,1)`.
pub fn ar_features(rng: &mut SimRng, n: usize, p: usize, rho: f64) -> Matrix {
    let c = (1.0 - rho * rho).sqrt();
    let mut u = Matrix::zeros(n, p);
    for i in 0..n {
        let row = u.row_mut(i);
        row[0] = standard_normal(rng);
        for j in 1..p {
            row[j] = rho * row[j - 1] + c * standard_normal(rng);
        }
    }
    u
}

/// `P(v = 1 | u) = exp(2w̄ᵀu) / (1 + exp(2w̄ᵀu))`, otherwise `v = −1`.
pub fn logistic_labels(rng: &mut SimRng, features: &Matrix, w: &[f64]) -> Vec<f64> {
    (0..features.rows())
        .map(|i| {
            let prob = sigmoid(2.0 * dot(features.row(i), w));
            if rng.gen::<f64>() < prob {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

pub fn gen_logistic(cfg: &LogisticSimConfig) -> Result<LogisticSample> {
    cfg.validate()?;
    let mut rng = sim_rng(cfg.seed);
    let w_true = sparse_normal_vector(&mut rng, cfg.p, cfg.k_true);
    let features = ar_features(&mut rng, cfg.n, cfg.p, cfg.ar_rho);
    let labels = logistic_labels(&mut rng, &features, &w_true);
    Ok(LogisticSample {
        data: LogisticData::new(features, labels, cfg.lambda)?,
        w_true,
    })
}

/// Random graph precision model `Ω̄ = B + σI` with condition number `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionSimConfig {
    pub p: usize,
    /// Probability that an off-diagonal entry of `B` is 1.
    pub edge_prob: f64,
    /// Training sample size.
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
}

impl PrecisionSimConfig {
    pub fn new(p: usize, n: usize) -> Self {
        Self {
            p,
            edge_prob: 0.1,
            n,
            replications: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 || self.n == 0 {
            return Err(invalid("need p >= 2 and n >= 1"));
        }
        if !(self.edge_prob > 0.0 && self.edge_prob < 1.0) {
            return Err(invalid(format!("edge probability must lie in (0, 1), got {}", self.edge_prob)));
        }
        Ok(())
    }
}

const MAX_GRAPH_DRAWS: usize = 20;

#[derive(Clone, Debug)]
pub struct PrecisionModel {
    pub omega: Matrix,
    pub sigma: Matrix,
    /// Symmetric square root of `sigma`.
    root: Matrix,
}

impl PrecisionModel {
    /// Model with the given precision matrix; fails unless it is positive
    /// definite.
    pub fn from_precision(omega: Matrix) -> Result<Self> {
        let e = sym_eigen(&omega)?;
        if !(e.min() > 0.0) {
            return Err(invalid("precision matrix is not positive definite"));
        }
        let sigma = e.reconstruct_with(|l| 1.0 / l).symmetrize();
        let root = e.reconstruct_with(|l| 1.0 / l.sqrt());
        Ok(Self { omega, sigma, root })
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    /// `n` draws from `N(0, Σ̄)`, one per row.
    pub fn sample(&self, rng: &mut SimRng, n: usize) -> Matrix {
        let p = self.dim();
        let mut x = Matrix::zeros(n, p);
        for i in 0..n {
            let z = normal_vec(rng, p);
            x.row_mut(i).copy_from_slice(&self.root.matvec(&z));
        }
        x
    }
}

/// Draws `B` and sets `σ = (λ_max(B) − p λ_min(B)) / (p − 1)`, which makes
/// `cond(B + σI) = p`. Redraws `B` when it has no edges.
pub fn gen_precision_model(rng: &mut SimRng, p: usize, edge_prob: f64) -> Result<PrecisionModel> {
    for _ in 0..MAX_GRAPH_DRAWS {
        let mut b = Matrix::zeros(p, p);
        for i in 0..p {
            for j in i + 1..p {
                if rng.gen::<f64>() < edge_prob {
                    b[(i, j)] = 1.0;
                    b[(j, i)] = 1.0;
                }
            }
        }
        let e = sym_eigen(&b)?;
        let (hi, lo) = (e.max(), e.min());
        let sigma = (hi - p as f64 * lo) / (p as f64 - 1.0);
        if !(lo + sigma > 0.0) {
            continue;
        }
        let mut omega = b;
        for i in 0..p {
            omega[(i, i)] = sigma;
        }
        return PrecisionModel::from_precision(omega);
    }
    Err(Error::Generation(format!(
        "no positive definite precision matrix after {MAX_GRAPH_DRAWS} draws (p = {p}, P = {edge_prob})"
    )))
}

#[derive(Clone, Debug)]
pub struct PrecisionSample {
    pub model: PrecisionModel,
    /// Training draws, one per row.
    pub samples: Matrix,
}

pub fn gen_precision(cfg: &PrecisionSimConfig) -> Result<PrecisionSample> {
    cfg.validate()?;
    let mut rng = sim_rng(cfg.seed);
    let model = gen_precision_model(&mut rng, cfg.p, cfg.edge_prob)?;
    let samples = model.sample(&mut rng, cfg.n);
    Ok(PrecisionSample { model, samples })
}

/// Maximum likelihood covariance `(1/n) Σ (x_i − x̄)(x_i − x̄)ᵀ`.
pub fn sample_covariance(x: &Matrix) -> Matrix {
    let (n, p) = (x.rows(), x.cols());
    let mut mean = vec![0.0; p];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centered = Matrix::from_fn(n, p, |i, j| x[(i, j)] - mean[j]);
    centered.gram().scale(1.0 / n as f64).symmetrize()
}

#[derive(Clone, Debug)]
pub struct LeastSquaresSample {
    pub model: LinearModel,
    pub x_true: Vec<f64>,
}

/// Gaussian design with `N(0, 1/n)` entries (unit expected column norm), a
/// `k`-sparse standard normal signal and `N(0, noise²)` observation noise.
pub fn gen_least_squares(n: usize, p: usize, k: usize, noise: f64, seed: u64) -> Result<LeastSquaresSample> {
    if n == 0 || p == 0 || k == 0 || k > p {
        return Err(invalid(format!("need n, p >= 1 and 1 <= k <= p (n = {n}, p = {p}, k = {k})")));
    }
    let mut rng = sim_rng(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let a = Matrix::from_fn(n, p, |_, _| scale * standard_normal(&mut rng));
    let x_true = sparse_normal_vector(&mut rng, p, k);
    let mut y = a.matvec(&x_true);
    if noise > 0.0 {
        for v in &mut y {
            *v += noise * standard_normal(&mut rng);
        }
    }
    Ok(LeastSquaresSample {
        model: LinearModel::new(a, y)?,
        x_true,
    })
}
