//! Serial against data-parallel execution for the hot loops.

use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tribowave::approx::{inner_products, Expansion, TestFunction, DEFAULT_QUAD_ORDER};
use tribowave::basis::{Basis, BasisConfig};
use tribowave::oracle::reference_oracles;
use tribowave::par::Execution;
use tribowave::problems::all_builtins;
use tribowave::report::{sweep, SweepOptions};

fn policies() -> [(&'static str, Execution); 2] {
    [("serial", Execution::Serial), ("parallel", Execution::parallel())]
}

fn bench_inner_products(c: &mut Criterion) {
    let mut group = c.benchmark_group("inner_products");
    let g = |t: f64| TestFunction::TLogT.eval(t);
    for (k, m) in [(3, 8), (5, 10)] {
        let basis = Basis::build(BasisConfig::new(k, m).unwrap()).unwrap();
        for (name, exec) in policies() {
            group.bench_with_input(BenchmarkId::new(name, format!("k{k}_M{m}")), &basis, |b, basis| {
                b.iter(|| inner_products(&g, basis, DEFAULT_QUAD_ORDER, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_grid_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_eval");
    let basis = Arc::new(Basis::build(BasisConfig::new(4, 8).unwrap()).unwrap());
    let coeffs: Vec<f64> = (0..basis.len()).map(|j| (j as f64).sin()).collect();
    let e = Expansion::new(basis, coeffs).unwrap();
    for (name, exec) in policies() {
        group.bench_function(name, |b| {
            b.iter(|| exec.map_range(100_001, |i| e.eval(black_box(i as f64 / 100_000.0))))
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep_efte_second");
    group.sample_size(10);
    let p = all_builtins().into_iter().find(|p| p.name == "efte-second").unwrap();
    let ms = [4, 5, 7, 9, 10, 11, 12, 13];
    for (name, exec) in policies() {
        let opts = SweepOptions {
            exec,
            ..SweepOptions::default()
        };
        group.bench_function(name, |b| b.iter(|| sweep(&p, 1, &ms, &opts)));
    }
    group.finish();
}

fn bench_oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_all_builtins");
    group.sample_size(10);
    let problems = all_builtins();
    for (name, exec) in policies() {
        group.bench_function(name, |b| b.iter(|| reference_oracles(&problems, 1024, exec)));
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_inner_products,
    bench_grid_eval,
    bench_sweep,
    bench_oracles
);
criterion_main!(benches);
