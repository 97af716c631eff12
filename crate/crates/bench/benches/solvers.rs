use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grahtp::experiments::{gen_least_squares, gen_precision, sample_covariance, sim_rng, standard_normal, PrecisionSimConfig};
use grahtp::precision::{adm_solve, AdmConfig, LogDetProblem};
use grahtp::{default_step_size, grahtp, hard_threshold, sym_eigen, Matrix, PairSupport, SolverConfig};

fn bench_hard_threshold(c: &mut Criterion) {
    let mut group = c.benchmark_group("hard_threshold");
    for p in [1_000usize, 100_000] {
        let mut rng = sim_rng(1);
        let x: Vec<f64> = (0..p).map(|_| standard_normal(&mut rng)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(p), &x, |b, x| {
            b.iter(|| hard_threshold(black_box(x), p / 100).unwrap())
        });
    }
    group.finish();
}

fn bench_sym_eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("sym_eigen");
    for p in [20usize, 100] {
        let mut rng = sim_rng(2);
        let a = Matrix::from_fn(p, p, |_, _| standard_normal(&mut rng)).symmetrize();
        group.bench_with_input(BenchmarkId::from_parameter(p), &a, |b, a| b.iter(|| sym_eigen(black_box(a)).unwrap()));
    }
    group.finish();
}

fn bench_grahtp_least_squares(c: &mut Criterion) {
    let s = gen_least_squares(256, 512, 16, 0.01, 3).unwrap();
    let eta = default_step_size(&s.model, 16, 3).unwrap();
    let cfg = SolverConfig::new(16, eta);
    let x0 = vec![0.0; 512];
    c.bench_function("grahtp_least_squares_256x512_k16", |b| {
        b.iter(|| grahtp(&s.model, black_box(&cfg), &x0).unwrap())
    });
}

fn bench_adm(c: &mut Criterion) {
    let mut group = c.benchmark_group("adm_solve");
    group.sample_size(20);
    for p in [20usize, 50] {
        let sample = gen_precision(&PrecisionSimConfig { seed: 4, ..PrecisionSimConfig::new(p, 100) }).unwrap();
        let problem = LogDetProblem::new(sample_covariance(&sample.samples), 100, 1e-2).unwrap();
        let support = PairSupport::of(&sample.model.omega, 0.0);
        let start = Matrix::identity(p).scale(problem.alpha());
        group.bench_with_input(BenchmarkId::from_parameter(p), &problem, |b, problem| {
            b.iter(|| adm_solve(problem, &support, &start, &AdmConfig::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_hard_threshold, bench_sym_eigen, bench_grahtp_least_squares, bench_adm);
criterion_main!(benches);
