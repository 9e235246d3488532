use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use zeroflow_core::bounds::{ellipse_min_brute, verify_flow_bound};
use zeroflow_core::measures::{ks_distance, EmpiricalMeasure, LimitMeasure};
use zeroflow_core::polyflow::{chebyshev_roots, derivative_roots, jacobi_roots, Generator};
use zeroflow_core::potential::potential_mu_t;

fn derivative_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("derivative_roots");
    for n in [100usize, 400, 1600] {
        let r = chebyshev_roots(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &r, |b, r| {
            b.iter(|| derivative_roots(black_box(r)).unwrap())
        });
    }
    group.finish();
}

fn jacobi(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi_roots");
    for n in [100usize, 400] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| jacobi_roots(black_box(n), 0.4, -0.4).unwrap())
        });
    }
    group.finish();
}

fn measures(c: &mut Criterion) {
    let rec = Generator::Chebyshev.flow(400, 200).unwrap();
    let e = EmpiricalMeasure::from_record(&rec);
    let m = LimitMeasure::new(0.5).unwrap();
    c.bench_function("ks_distance/400", |b| {
        b.iter(|| ks_distance(black_box(&e), &m).unwrap())
    });
    c.bench_function("potential_mu_t/on_support", |b| {
        b.iter(|| potential_mu_t(&m, black_box(Complex64::new(0.3, 0.0))).unwrap())
    });
}

fn bounds(c: &mut Criterion) {
    c.bench_function("ellipse_min_brute/4096", |b| {
        b.iter(|| ellipse_min_brute(black_box(2.0), 0.3, 4096).unwrap())
    });
    let rec = Generator::Chebyshev.flow(200, 100).unwrap();
    let a = 1.0 / 0.75f64.sqrt();
    let mut group = c.benchmark_group("verify_flow_bound");
    group.sample_size(10);
    group.bench_function("n200_k100", |b| {
        b.iter(|| verify_flow_bound(black_box(&rec), a, &[0.0]).unwrap())
    });
    group.finish();
}

criterion_group!(benches, derivative_step, jacobi, measures, bounds);
criterion_main!(benches);
