//! Benchmarks of the three hot paths: one interior-point relaxation solve,
//! one kernel training problem, and a small branch-and-bound run.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucwarm_core::bnb::{solve_mip, BnbSettings};
use ucwarm_core::conic::{solve, SolverSettings};
use ucwarm_core::grid::{load_grid, GridSpec, ScenarioInput};
use ucwarm_core::svm::{train_kernel, train_linear, LabeledSet};
use ucwarm_core::uc::{build_uc, UcOptions};

fn fixture(name: &str) -> GridSpec {
    let path = format!("{}/../../data/{name}.json", env!("CARGO_MANIFEST_DIR"));
    load_grid(path).expect("bundled fixture loads")
}

fn flat_scenario(grid: &GridSpec, peaks: &[(usize, f64)]) -> ScenarioInput {
    let mut demand = vec![vec![0.0; grid.horizon]; grid.n_buses()];
    for &(bus, peak) in peaks {
        demand[bus] = vec![peak; grid.horizon];
    }
    let wind = vec![vec![0.0; grid.horizon]; grid.n_buses()];
    ScenarioInput::from_active_with_power_factor(wind, demand, 0.95)
}

fn random_set(h: usize) -> LabeledSet {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut features = Vec::with_capacity(h);
    let mut labels = Vec::with_capacity(h);
    for i in 0..h {
        let x = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        labels.push(if i < 2 { [1.0, -1.0][i] } else if x[0] + x[1] > 0.0 { 1.0 } else { -1.0 });
        features.push(x);
    }
    LabeledSet::new(features, labels, "bench").unwrap()
}

fn bench_relaxation_solve(c: &mut Criterion) {
    let mut grid = fixture("six_bus");
    grid.horizon = 6;
    let scenario = flat_scenario(&grid, &[(1, 0.4), (3, 0.7), (5, 0.6)]);
    let model = build_uc(&grid, &scenario, &UcOptions::default()).unwrap();
    let settings = SolverSettings::default();
    let mut group = c.benchmark_group("conic");
    group.sample_size(20);
    group.bench_function("six_bus_6h_relaxation", |b| {
        b.iter(|| solve(&model.mip.base, &settings))
    });
    group.finish();
}

fn bench_training(c: &mut Criterion) {
    let set = random_set(20);
    let mut group = c.benchmark_group("svm");
    group.bench_function("linear_h20_lambda_0.05", |b| {
        b.iter(|| train_linear(&set, 0.05).unwrap())
    });
    group.bench_function("kernel_h20_lambda_0.05_gamma_0.7", |b| {
        b.iter(|| train_kernel(&set, 0.05, 0.7).unwrap())
    });
    group.finish();
}

fn bench_branch_and_bound(c: &mut Criterion) {
    let grid = fixture("two_bus");
    let scenario = flat_scenario(&grid, &[(0, 0.4), (1, 0.25)]);
    let model = build_uc(&grid, &scenario, &UcOptions::default()).unwrap();
    let settings = BnbSettings::default();
    let mut group = c.benchmark_group("bnb");
    group.sample_size(20);
    group.bench_function("two_bus_3h_mip", |b| {
        b.iter(|| solve_mip(&model.mip, &settings, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_relaxation_solve, bench_training, bench_branch_and_bound);
criterion_main!(benches);
