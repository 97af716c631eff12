use grahtp::experiments::{
    ar_features, gen_precision_model, logistic_labels, sample_covariance, sim_rng, PrecisionModel,
};
use grahtp::numerics::sym_eigen;
use grahtp::Matrix;

fn column_stats(u: &Matrix, j: usize) -> (f64, f64) {
    let n = u.rows() as f64;
    let mean = (0..u.rows()).map(|i| u[(i, j)]).sum::<f64>() / n;
    let var = (0..u.rows()).map(|i| (u[(i, j)] - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

#[test]
fn ar_features_have_unit_variance_and_lag_one_correlation() {
    let mut rng = sim_rng(4);
    let (n, p, rho) = (10_000, 6, 0.5);
    let u = ar_features(&mut rng, n, p, rho);
    for j in 0..p {
        let (_, var) = column_stats(&u, j);
        assert!((0.9..=1.1).contains(&var), "column {j} variance {var}");
    }
    for j in 0..p - 1 {
        let (ma, va) = column_stats(&u, j);
        let (mb, vb) = column_stats(&u, j + 1);
        let cov = (0..n).map(|i| (u[(i, j)] - ma) * (u[(i, j + 1)] - mb)).sum::<f64>() / n as f64;
        let corr = cov / (va * vb).sqrt();
        assert!((0.45..=0.55).contains(&corr), "columns {j},{} correlation {corr}", j + 1);
    }
}

#[test]
fn zero_weights_give_balanced_labels() {
    let mut rng = sim_rng(9);
    let n = 10_000;
    let u = ar_features(&mut rng, n, 5, 0.5);
    let v = logistic_labels(&mut rng, &u, &[0.0; 5]);
    assert!(v.iter().all(|l| *l == 1.0 || *l == -1.0));
    let positive = v.iter().filter(|l| **l > 0.0).count() as f64 / n as f64;
    // four standard deviations of a fair coin over 10⁴ flips
    assert!((positive - 0.5).abs() < 0.02, "positive fraction {positive}");
}

#[test]
fn strong_weights_follow_the_link() {
    let mut rng = sim_rng(10);
    let u = ar_features(&mut rng, 2000, 3, 0.0);
    let w = [4.0, 0.0, 0.0];
    let v = logistic_labels(&mut rng, &u, &w);
    let agree = (0..2000).filter(|&i| (u[(i, 0)] > 0.0) == (v[i] > 0.0)).count();
    assert!(agree > 1800, "{agree}/2000 labels agree with the sign of the score");
}

#[test]
fn precision_model_has_condition_number_p() {
    for (seed, p) in [(1u64, 10usize), (2, 25), (3, 40)] {
        let mut rng = sim_rng(seed);
        let model = gen_precision_model(&mut rng, p, 0.1).unwrap();
        let e = sym_eigen(&model.omega).unwrap();
        let cond = e.max() / e.min();
        assert!((cond - p as f64).abs() < 1e-6 * p as f64, "p = {p}: cond {cond}");
        let product = model.omega.matmul(&model.sigma);
        assert!(product.sub(&Matrix::identity(p)).max_abs() < 1e-9);
        for i in 0..p {
            for j in 0..p {
                if i != j {
                    assert!(model.omega[(i, j)] == 0.0 || model.omega[(i, j)] == 1.0);
                }
            }
        }
    }
}

#[test]
fn edge_density_matches_probability() {
    let (p, prob) = (60, 0.1);
    let pairs = p * (p - 1) / 2;
    let mut rng = sim_rng(21);
    let model = gen_precision_model(&mut rng, p, prob).unwrap();
    let edges = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).filter(|&(i, j)| model.omega[(i, j)] != 0.0).count();
    let mean = pairs as f64 * prob;
    let sd = (pairs as f64 * prob * (1.0 - prob)).sqrt();
    assert!((edges as f64 - mean).abs() <= 3.0 * sd, "{edges} edges, expected {mean} ± {sd}");
}

#[test]
fn gaussian_draws_reproduce_the_covariance() {
    let omega = Matrix::from_rows(&[
        vec![2.0, 0.5, 0.0, 0.0, 0.0],
        vec![0.5, 2.0, 0.5, 0.0, 0.0],
        vec![0.0, 0.5, 2.0, 0.5, 0.0],
        vec![0.0, 0.0, 0.5, 2.0, 0.5],
        vec![0.0, 0.0, 0.0, 0.5, 2.0],
    ])
    .unwrap();
    let model = PrecisionModel::from_precision(omega).unwrap();
    let mut rng = sim_rng(5);
    let x = model.sample(&mut rng, 100_000);
    let cov = sample_covariance(&x);
    let err = cov.sub(&model.sigma).max_abs();
    assert!(err < 0.05, "max entry error {err}");
}

#[test]
fn indefinite_precision_is_rejected() {
    let omega = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
    assert!(PrecisionModel::from_precision(omega).is_err());
}
