use grahtp::experiments::{
    compute_matrix_metrics, default_precision_step, gen_precision_model, sample_covariance, sim_rng, PrecisionModel,
    DEFAULT_THRESHOLD,
};
use grahtp::numerics::{dot, sym_eigen, sym_eigenvalues};
use grahtp::precision::{
    adm_solve, diagonal_estimate, lda_score, modified_grahtp, AdmConfig, LdaModel, LogDetProblem, BOX_TOL,
};
use grahtp::{Matrix, PairSupport, SolverConfig};
use rand::Rng;

fn random_spd(seed: u64, p: usize, lo: f64, hi: f64) -> Matrix {
    let mut rng = sim_rng(seed);
    let raw = Matrix::from_fn(p, p, |_, _| rng.gen_range(-1.0..1.0)).symmetrize();
    let v = sym_eigen(&raw).unwrap().vectors;
    let d: Vec<f64> = (0..p).map(|_| rng.gen_range(lo..hi)).collect();
    v.matmul(&Matrix::from_diag(&d)).matmul(&v.transpose()).symmetrize()
}

fn tridiagonal(p: usize, diag: f64, off: f64) -> Matrix {
    Matrix::from_fn(p, p, |i, j| {
        if i == j {
            diag
        } else if i.abs_diff(j) == 1 {
            off
        } else {
            0.0
        }
    })
}

#[test]
fn diagonal_support_clips_reciprocal_variances() {
    let sigma = [0.5, 2.0, 4.0, 1.0];
    let (alpha, beta) = (0.3, 1.5);
    let problem = LogDetProblem::with_box(Matrix::from_diag(&sigma), 100, alpha, beta).unwrap();
    let start = Matrix::identity(4).scale(alpha);
    let out = adm_solve(&problem, &PairSupport::diagonal(4), &start, &AdmConfig::default()).unwrap();
    assert!(out.converged);
    for (i, s) in sigma.iter().enumerate() {
        let expect = (1.0 / s).clamp(alpha, beta);
        assert!((out.theta[(i, i)] - expect).abs() < 1e-5, "entry {i}: {} vs {expect}", out.theta[(i, i)]);
    }
    assert_eq!(out.theta.sub(&Matrix::from_diag(&out.theta.diag())).max_abs(), 0.0);
}

#[test]
fn complete_support_inverts_the_covariance() {
    for seed in 0..5u64 {
        let cov = random_spd(seed, 4, 0.5, 2.0);
        let problem = LogDetProblem::with_box(cov.clone(), 100, 0.1, 10.0).unwrap();
        let out = adm_solve(&problem, &PairSupport::complete(4), &Matrix::identity(4), &AdmConfig::default()).unwrap();
        let residual = cov.matmul(&out.theta).sub(&Matrix::identity(4)).max_abs();
        assert!(residual < 1e-4, "seed {seed}: ‖ΣΘ − I‖ = {residual}");
    }
}

#[test]
fn diagonal_covariance_keeps_off_diagonal_zero() {
    let cov = Matrix::from_diag(&[1.0, 2.0, 3.0, 4.0, 5.0]);
    let problem = LogDetProblem::new(cov, 200, 1e-2).unwrap();
    let cfg = SolverConfig::new(1, default_precision_step(&problem));
    let (omega, _) = modified_grahtp(&problem, &cfg, &AdmConfig::default()).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            if i != j {
                assert!(omega[(i, j)].abs() <= 1e-5, "({i},{j}) = {}", omega[(i, j)]);
            }
        }
    }
}

#[test]
fn chain_graph_is_recovered() {
    let p = 10;
    let model = PrecisionModel::from_precision(tridiagonal(p, 2.0, 0.6)).unwrap();
    let mut rng = sim_rng(3);
    let n = 5000;
    let x = model.sample(&mut rng, n);
    let problem = LogDetProblem::new(sample_covariance(&x), n, 1e-2).unwrap();
    let cfg = SolverConfig::new(p - 1, default_precision_step(&problem));
    let (omega, _) = modified_grahtp(&problem, &cfg, &AdmConfig::default()).unwrap();
    let m = compute_matrix_metrics(&model.omega, &omega, DEFAULT_THRESHOLD).unwrap();
    assert_eq!(m.f_score, 1.0, "{m:?}");
}

#[test]
fn sparse_estimate_beats_diagonal_baseline() {
    let (p, n) = (20, 100);
    let adm = AdmConfig::default();
    let mut wins = 0;
    for seed in 0..100u64 {
        let mut rng = sim_rng(seed);
        let model = gen_precision_model(&mut rng, p, 0.1).unwrap();
        let x = model.sample(&mut rng, n);
        let problem = LogDetProblem::new(sample_covariance(&x), n, 1e-2).unwrap();
        let mut cfg = SolverConfig::new(p, default_precision_step(&problem));
        cfg.max_iters = 100;
        let (omega, _) = modified_grahtp(&problem, &cfg, &adm).unwrap();
        let base = diagonal_estimate(&problem, &adm).unwrap();
        if model.omega.sub(&omega).frobenius_norm() < model.omega.sub(&base).frobenius_norm() {
            wins += 1;
        }
    }
    assert!(wins >= 90, "sparse estimate won {wins}/100");
}

#[test]
fn iterates_are_symmetric_feasible_and_sparse() {
    let p = 12;
    let mut rng = sim_rng(8);
    let model = gen_precision_model(&mut rng, p, 0.15).unwrap();
    let x = model.sample(&mut rng, 60);
    let problem = LogDetProblem::new(sample_covariance(&x), 60, 1e-2).unwrap();
    for k in [1, 6, 20] {
        let mut cfg = SolverConfig::new(k, default_precision_step(&problem));
        cfg.record_iterates = true;
        cfg.max_iters = 40;
        let (_, trace) = modified_grahtp(&problem, &cfg, &AdmConfig::default()).unwrap();
        for (r, it) in trace.records.iter().zip(trace.iterates()) {
            let omega = Matrix::from_vec(p, p, it.to_vec()).unwrap();
            assert_eq!(omega.asymmetry(), 0.0, "k = {k}, iteration {}", r.iteration);
            let eig = sym_eigenvalues(&omega).unwrap();
            let (lo, hi) = eig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, v| (a.0.min(*v), a.1.max(*v)));
            assert!(lo >= problem.alpha() - BOX_TOL && hi <= problem.beta() + BOX_TOL);
            assert!(PairSupport::of(&omega, 0.0).len() <= k);
            assert!(r.support.len() <= k);
        }
    }
}

/// Log posterior odds of class 1 from the Gaussian densities directly.
fn bayes_log_odds(omega: &Matrix, means: &[Vec<f64>; 2], priors: [f64; 2], x: &[f64]) -> f64 {
    let quad = |mu: &[f64]| {
        let d: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
        dot(&d, &omega.matvec(&d))
    };
    priors[0].ln() - 0.5 * quad(&means[0]) - priors[1].ln() + 0.5 * quad(&means[1])
}

#[test]
fn lda_with_true_parameters_is_the_bayes_rule() {
    let p = 6;
    let omega = tridiagonal(p, 1.5, -0.4);
    let means = [vec![0.5, 0.0, -0.3, 0.2, 0.0, 0.1], vec![-0.2, 0.4, 0.0, 0.0, 0.3, -0.1]];
    let priors = [0.3, 0.7];
    let model = LdaModel::new(omega.clone(), means.clone(), priors).unwrap();
    let mut rng = sim_rng(14);
    for _ in 0..200 {
        let x: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let score = lda_score(&model, &x).unwrap();
        let odds = bayes_log_odds(&omega, &means, priors, &x);
        assert!((score.delta[0] - score.delta[1] - odds).abs() < 1e-10);
        assert_eq!(score.class, if odds > 0.0 { 1 } else { 2 });
    }
}
