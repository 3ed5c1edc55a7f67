use std::hint::black_box;

use aloha_capture::optimize::{hetero_max_sum_rate, HeteroSearch};
use aloha_capture::simulate::{replicate, SimConfig, SimNetwork};
use aloha_capture::{
    grid, solve_homogeneous, BackoffSchedule, Exec, GroupSpec, NetworkConfig, SolverOptions,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const STRATEGIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn replications(c: &mut Criterion) {
    let config = NetworkConfig::new(
        50,
        10.0,
        1.0,
        BackoffSchedule::binary_exponential(0.1, 3).unwrap(),
    )
    .unwrap();
    let net = SimNetwork::homogeneous(&config).unwrap();
    let sim = SimConfig::new(20_000, 1).with_replications(8);
    let mut group = c.benchmark_group("replicate_8x20k_slots");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| replicate(black_box(&net), &sim, exec).unwrap())
        });
    }
    group.finish();
}

fn q0_sweep(c: &mut Criterion) {
    let q0s = grid::linspace(0.0005, 1.0, 2000);
    let mut group = c.benchmark_group("q0_sweep_2000_beb");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec.map(&q0s, |&q0| {
                    let s = BackoffSchedule::binary_exponential(q0, 5).unwrap();
                    let cfg = NetworkConfig::new(50, 10.0, 1.0, s).unwrap();
                    solve_homogeneous(&cfg, &SolverOptions::exact()).unwrap().p
                })
            })
        });
    }
    group.finish();
}

fn hetero_search(c: &mut Criterion) {
    let spec = GroupSpec::two_group_with_mean(25, 25, 10.0, 100.0).unwrap();
    let shape = BackoffSchedule::constant(1.0, 0).unwrap();
    let mut group = c.benchmark_group("hetero_search_100mu");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let search = HeteroSearch {
            mu_points: 100,
            exec,
            ..HeteroSearch::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| hetero_max_sum_rate(black_box(&spec), &shape, &search).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, replications, q0_sweep, hetero_search);
criterion_main!(benches);
