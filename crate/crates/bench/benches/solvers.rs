use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lasso_tradeoff::boundary::sample_boundary;
use lasso_tradeoff::l0_search::{best_subset, L0Config};
use lasso_tradeoff::lasso_sim::{lasso_at, lasso_path, LambdaGrid, SolverConfig};
use lasso_tradeoff::state_evolution::{solve_lambda_point, sweep_alpha};
use lasso_tradeoff::{ProblemShape, ScalarGrid, SeInput};
use lasso_tradeoff_bench::{fifty_prior, sparse_instance};

fn lasso(c: &mut Criterion) {
    let mut g = c.benchmark_group("lasso");
    g.sample_size(10);
    for &(n, p) in &[(100, 200), (250, 1000)] {
        let inst = sparse_instance(n, p, 1.0, 7);
        let grid = LambdaGrid::default().resolve(inst.lambda_max()).unwrap();
        g.bench_with_input(BenchmarkId::new("path", format!("{n}x{p}")), &inst, |b, inst| {
            b.iter(|| lasso_path(black_box(inst), &grid).unwrap())
        });
        let lambda = 0.1 * inst.lambda_max();
        g.bench_with_input(BenchmarkId::new("cold_solve", format!("{n}x{p}")), &inst, |b, inst| {
            b.iter(|| lasso_at(black_box(inst), lambda, None, &SolverConfig::default()).unwrap())
        });
    }
    g.finish();
}

fn state_evolution(c: &mut Criterion) {
    let prior = fifty_prior();
    let grid = ScalarGrid::linspace(0.05, 20.0, 200).unwrap();
    c.bench_function("se/sweep_200", |b| {
        b.iter(|| sweep_alpha(black_box(&prior), 1.0, 1.0, &grid).unwrap())
    });
    let input = SeInput {
        prior: prior.clone(),
        delta: 1.0,
        sigma: 1.0,
        lambda: 4.0,
    };
    c.bench_function("se/lambda_point", |b| {
        b.iter(|| solve_lambda_point(black_box(&input)).unwrap())
    });
}

fn best_subset_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("l0");
    g.sample_size(10);
    for p in [12, 16] {
        let inst = sparse_instance(2 * p, p, 0.1, 3);
        let cfg = L0Config::new(0.3).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(p), &inst, |b, inst| {
            b.iter(|| best_subset(black_box(inst), &cfg).unwrap())
        });
    }
    g.finish();
}

fn boundary(c: &mut Criterion) {
    let shape = ProblemShape::new(0.3, 0.15).unwrap();
    c.bench_function("boundary/sample_200", |b| {
        b.iter(|| sample_boundary(black_box(shape), 200).unwrap())
    });
}

criterion_group!(benches, lasso, state_evolution, best_subset_search, boundary);
criterion_main!(benches);
