//! Sequential against parallel enumeration.
//!
//! Every routine runs once inside a one-thread rayon pool and once inside a
//! pool with one thread per core. Built with `--no-default-features` both
//! rows measure the plain-iterator path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use finmono::criteria::{
    check_digit_criterion, gauss_criterion, search, CheckOptions, SystemSpec, Twist,
};
use finmono::proofcheck::{verify_induction_assembly, AssemblyConfig};
use finmono::traces::{trace_table, ParameterGrid};
use finmono::FieldTable;
use rayon::ThreadPoolBuilder;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    // always two pools, even on a single core
    [1, cores.max(2)]
        .into_iter()
        .map(|n| {
            let label = if n == 1 {
                "sequential".to_string()
            } else {
                format!("parallel-{n}")
            };
            (
                label,
                ThreadPoolBuilder::new().num_threads(n).build().unwrap(),
            )
        })
        .collect()
}

fn co3() -> SystemSpec {
    SystemSpec::new(3, 23, vec![1, 5], Twist::Quadratic).unwrap()
}

fn bench_criteria(c: &mut Criterion) {
    let spec = co3();
    let k5 = FieldTable::new(3, 5).unwrap();
    let mut group = c.benchmark_group("criteria");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::new("digit f=6", &label), |b| {
            b.iter(|| {
                pool.install(|| {
                    check_digit_criterion(black_box(&spec), 6, CheckOptions::default()).unwrap()
                })
            })
        });
        group.bench_function(BenchmarkId::new("gauss f=5", &label), |b| {
            b.iter(|| {
                pool.install(|| {
                    gauss_criterion(black_box(&spec), &k5, CheckOptions::default()).unwrap()
                })
            })
        });
    }
    group.finish();
}

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::new("p=3 D<=500 f<=5", &label), |b| {
            b.iter(|| pool.install(|| search(3, 2..=500, Twist::Quadratic, 5).unwrap()))
        });
    }
    group.finish();
}

fn bench_traces(c: &mut Criterion) {
    let spec = co3();
    let k = FieldTable::new(3, 4).unwrap();
    let mut group = c.benchmark_group("traces");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::new("two-parameter F_81", &label), |b| {
            b.iter(|| {
                pool.install(|| trace_table(&spec, &k, ParameterGrid::Full, u128::MAX).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_proof(c: &mut Criterion) {
    let cfg = AssemblyConfig {
        budget: 1 << 24,
        sample: None,
    };
    let mut group = c.benchmark_group("proofcheck");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::new("induction f=6", &label), |b| {
            b.iter(|| pool.install(|| verify_induction_assembly(6, cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_criteria,
    bench_search,
    bench_traces,
    bench_proof
);
criterion_main!(benches);
