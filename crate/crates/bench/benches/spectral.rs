use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperflow::elliptic::{poisson_free_space, poisson_torus_zero_mean};
use hyperflow::norms::{hs_norm, weighted_norm, DyadicPartition, NormSpec};
use hyperflow::random::{low_pass_field, rng, Bump, LowPassSpec};
use hyperflow::solver::{solve, Burgers, SolverConfig};
use hyperflow::{spectral, Grid, RealField};

fn fourier(c: &mut Criterion) {
    let mut group = c.benchmark_group("fourier");
    for (dim, n) in [(1, 1024), (2, 128), (3, 32)] {
        let grid = Grid::periodic(dim, n, 2.0 * std::f64::consts::PI).unwrap();
        let f = low_pass_field(&mut rng(1), grid, 1, &LowPassSpec::default());
        group.bench_with_input(BenchmarkId::new("roundtrip", format!("{dim}d_{n}")), &f, |b, f| {
            b.iter(|| spectral::inverse_transform(&spectral::transform(black_box(f))))
        });
        group.bench_with_input(BenchmarkId::new("hs_norm", format!("{dim}d_{n}")), &f, |b, f| {
            b.iter(|| hs_norm(black_box(f), 2.5))
        });
    }
    group.finish();
}

fn norms(c: &mut Criterion) {
    let grid = Grid::centered(1, 256, 16.0).unwrap();
    let bump = Bump { center: [0.5, 0.0, 0.0], radius: 2.0, amplitude: 1.0 }.sample(grid);
    let spec = NormSpec::new(2.0, 0.5);
    let partition = DyadicPartition::new(3);
    c.bench_function("weighted_norm_1d_256", |b| b.iter(|| weighted_norm(black_box(&bump), &spec, &partition).unwrap()));
}

fn elliptic(c: &mut Criterion) {
    let torus = Grid::periodic(3, 32, 2.0 * std::f64::consts::PI).unwrap();
    let f = low_pass_field(&mut rng(2), torus, 1, &LowPassSpec::default());
    c.bench_function("poisson_torus_32", |b| b.iter(|| poisson_torus_zero_mean(black_box(&f)).unwrap()));
    let boxed = Grid::centered(3, 32, 16.0).unwrap();
    let rho = RealField::scalar(boxed, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp());
    c.bench_function("poisson_free_space_32", |b| b.iter(|| poisson_free_space(black_box(&rho)).unwrap()));
}

fn solver(c: &mut Criterion) {
    let grid = Grid::periodic(1, 256, 2.0 * std::f64::consts::PI).unwrap();
    let u0 = RealField::scalar(grid, |x| 0.1 * x[0].sin());
    let cfg = SolverConfig { keep_states: false, ..SolverConfig::default() };
    c.bench_function("burgers_256_100_steps", |b| b.iter(|| solve(&Burgers, black_box(&u0), 1.0, 0.01, 1.0, &cfg).unwrap()));
}

criterion_group!(benches, fourier, norms, elliptic, solver);
criterion_main!(benches);
