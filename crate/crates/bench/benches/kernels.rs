use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rigidity_core::curvature::{kmin_bracket, riemann};
use rigidity_core::ddvv::{self, lhs_gradient, maximize_ratio, random_tuple_with};
use rigidity_core::immersion::{builtin, sample_random, DiffOptions};
use rigidity_core::rng::rng_for;
use rigidity_core::symmat::random_symmetric;
use rigidity_core::FundamentalData;

fn data(n: usize, p: usize) -> FundamentalData {
    let forms = (0..p).map(|a| random_symmetric(n, a as u64, 1.0)).collect();
    FundamentalData::new(n, 1.0, forms, None).unwrap()
}

fn curvature(c: &mut Criterion) {
    let mut g = c.benchmark_group("curvature");
    for (n, p) in [(2, 2), (4, 4), (6, 6)] {
        let d = data(n, p);
        g.bench_with_input(
            BenchmarkId::new("riemann", format!("{n}x{p}")),
            &d,
            |b, d| b.iter(|| riemann(black_box(d))),
        );
        g.bench_with_input(
            BenchmarkId::new("kmin_bracket", format!("{n}x{p}")),
            &d,
            |b, d| b.iter(|| kmin_bracket(black_box(d), 16, 0).unwrap()),
        );
    }
    g.finish();
}

fn commutators(c: &mut Criterion) {
    let mut g = c.benchmark_group("ddvv");
    for (n, m) in [(3, 3), (6, 6)] {
        let t = random_tuple_with(&mut rng_for(1, 0), n, m);
        let id = format!("{n}x{m}");
        g.bench_with_input(BenchmarkId::new("ratio", &id), &t, |b, t| {
            b.iter(|| ddvv::ratio(black_box(t)))
        });
        g.bench_with_input(BenchmarkId::new("gradient", &id), &t, |b, t| {
            b.iter(|| lhs_gradient(black_box(t)))
        });
    }
    g.sample_size(10);
    g.bench_function("maximize/3x3", |b| {
        b.iter(|| maximize_ratio(3, 3, 0, 8, 500).unwrap())
    });
    g.finish();
}

fn immersion(c: &mut Criterion) {
    let spec = builtin("veronese").unwrap();
    let opts = DiffOptions::default();
    c.bench_function("immersion/veronese_64", |b| {
        b.iter(|| sample_random(black_box(&spec), 64, 0, &opts).unwrap())
    });
}

criterion_group!(benches, curvature, commutators, immersion);
criterion_main!(benches);
