use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use twavrp::separation::solve_separation;
use twavrp::vrptw::solve_vrptw;
use twavrp::{solve_twavrp, SearchConfig, SubproblemSpec};
use twavrp_bench::{generated, random_continuous, toy};

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(20);
    let toy = toy();
    g.bench_function("toy", |b| {
        b.iter(|| solve_twavrp(black_box(&toy), &SearchConfig::default()).unwrap())
    });
    for seed in [0u64, 8] {
        let inst = random_continuous(seed);
        for (name, path_branching) in [("paths", true), ("windows", false)] {
            let cfg = SearchConfig {
                path_branching,
                ..SearchConfig::default()
            };
            g.bench_with_input(
                BenchmarkId::new(format!("random8/{name}"), seed),
                &inst,
                |b, inst| b.iter(|| solve_twavrp(inst, &cfg).unwrap()),
            );
        }
    }
    let inst = generated(15);
    for workers in [1usize, 3] {
        let cfg = SearchConfig {
            workers,
            ..SearchConfig::default()
        };
        g.bench_with_input(
            BenchmarkId::new("generated10/workers", workers),
            &inst,
            |b, inst| b.iter(|| solve_twavrp(inst, &cfg).unwrap()),
        );
    }
    g.finish();
}

fn subproblems(c: &mut Criterion) {
    let inst = generated(15);
    let params = inst.all_scenario_params();
    c.bench_function("vrptw/generated10", |b| {
        b.iter(|| solve_vrptw(&SubproblemSpec::exogenous(black_box(&params[0]))).unwrap())
    });
    let sets: Vec<_> = params
        .iter()
        .map(|p| solve_vrptw(&SubproblemSpec::exogenous(p)).unwrap().routes)
        .collect();
    let windows = inst.exogenous_windows();
    c.bench_function("separation/generated10", |b| {
        b.iter(|| solve_separation(black_box(&sets), &windows, &inst).unwrap())
    });
}

criterion_group!(benches, search, subproblems);
criterion_main!(benches);
