use std::hint::black_box;

use congruence_lab_bench::{algebras, LEVELS, TRACES};
use congruence_lab::congruence::{gamma_n_coords, quat_unit_coords};
use congruence_lab::modular::classes_of_trace;
use congruence_lab::{is_division, EnumerationWindow};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn classes(c: &mut Criterion) {
    let mut g = c.benchmark_group("classes_of_trace");
    for t in TRACES {
        g.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| classes_of_trace(black_box(t)).unwrap().mu0())
        });
    }
    g.finish();
}

fn gamma_n(c: &mut Criterion) {
    let mut g = c.benchmark_group("gamma_n_coords");
    g.sample_size(10);
    let window = EnumerationWindow::new(2000).unwrap();
    for n in LEVELS {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| gamma_n_coords(black_box(n), window).unwrap().len())
        });
    }
    g.finish();
}

fn quat_units(c: &mut Criterion) {
    let mut g = c.benchmark_group("quat_unit_coords");
    g.sample_size(10);
    for h in [50, 200] {
        let window = EnumerationWindow::new(h).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(h), &window, |b, &w| {
            b.iter(|| quat_unit_coords(black_box(3), w).unwrap().len())
        });
    }
    g.finish();
}

fn division(c: &mut Criterion) {
    let algs = algebras();
    c.bench_function("is_division", |b| {
        b.iter(|| algs.iter().filter(|a| is_division(black_box(a)).unwrap().is_division()).count())
    });
}

criterion_group!(kernels, classes, gamma_n, quat_units, division);
criterion_main!(kernels);
