use std::f64::consts::FRAC_PI_3;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use teichlab_bench::{beta, modulus};
use teichlab_core::{alpha_mu, alpha_mu1, angle_numeric, distance, synthesize, BlockPoint, Schedule, Tolerances, TriangleSpec};

fn bench_distance(c: &mut Criterion) {
    let k = modulus();
    let (p, q) = (BlockPoint::new(0.3, -0.8), BlockPoint::new(1.7, 0.2));
    c.bench_function("distance", |b| b.iter(|| distance(black_box(p), black_box(q), k)));
}

fn bench_angle(c: &mut Criterion) {
    let k = modulus();
    let (schedule, tol) = (Schedule::default(), Tolerances::default());
    let (a, a1, s) = (alpha_mu(k), alpha_mu1(k), beta(k));
    c.bench_function("angle_numeric/base", |b| {
        b.iter(|| angle_numeric(black_box(&a), black_box(&a1), BlockPoint::BASE, &schedule, &tol))
    });
    c.bench_function("angle_numeric/sigma", |b| {
        b.iter(|| angle_numeric(black_box(&a), black_box(&s), BlockPoint::MU, &schedule, &tol))
    });
}

fn bench_synthesize(c: &mut Criterion) {
    let k = modulus();
    let spec = TriangleSpec { l: k.length(), theta: [FRAC_PI_3, 1.2, 0.9], family_seed: 1 };
    c.bench_function("synthesize", |b| b.iter(|| synthesize(black_box(&spec))));
}

criterion_group!(benches, bench_distance, bench_angle, bench_synthesize);
criterion_main!(benches);
