//! Parallel against single-worker runs of the data-parallel kernels.
//!
//! `cargo bench -p harmonic-gap` compares one worker with the full pool;
//! `cargo bench -p harmonic-gap --no-default-features` measures the
//! sequential build, where both variants run on the calling thread.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use harmonic_gap::construct::{self, Center};
use harmonic_gap::counting::{self, PointSet};
use harmonic_gap::oracle::scan_records;
use harmonic_gap::{par, Rat};

fn variants() -> [(&'static str, Option<usize>); 2] {
    [("one-worker", Some(1)), ("all-workers", None)]
}

fn bench_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan_records");
    g.sample_size(10);
    for (name, threads) in variants() {
        g.bench_with_input(BenchmarkId::new(name, 50_000), &50_000u64, |b, &n| {
            b.iter(|| par::with_threads(threads, || scan_records(black_box(n), None).unwrap()))
        });
    }
    g.finish();
}

fn bench_joint_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("joint_search");
    g.sample_size(10);
    for (name, threads) in variants() {
        g.bench_function(BenchmarkId::new(name, "k<=30,w=3"), |b| {
            b.iter(|| par::with_threads(threads, || construct::joint_search(30, 3, 128, Center::DStar).unwrap()))
        });
    }
    g.finish();
}

fn bench_exp_sums(c: &mut Criterion) {
    let points = PointSet::from_rats((1..=1000u64).map(|n| Rat::new((n * n * 3).into(), 10007u64.into())));
    let mut g = c.benchmark_group("exp_sums");
    g.sample_size(10);
    for (name, threads) in variants() {
        g.bench_function(BenchmarkId::new(name, "N=1000,L=50"), |b| {
            b.iter(|| par::with_threads(threads, || counting::exp_sums(black_box(&points), 50, 96).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_scan, bench_joint_search, bench_exp_sums);
criterion_main!(benches);
