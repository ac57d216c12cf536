use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracvar_core::fracops::{caputo_profile, compose_rl_after_caputo_half, rl_integral};
use fracvar_core::{FractionalOrder, Grid, Side, Trajectory};

fn sine(n: usize) -> Trajectory {
    Trajectory::from_fn(Grid::new(0.0, 1.0, n).unwrap(), |t| (2.0 * t + 0.3).sin()).unwrap()
}

fn point_values(c: &mut Criterion) {
    let mut group = c.benchmark_group("rl_integral_at_end");
    for n in [1025, 4097] {
        let x = sine(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| rl_integral(black_box(x), FractionalOrder::HALF, Side::Left, 1.0).unwrap())
        });
    }
    group.finish();
}

fn profiles(c: &mut Criterion) {
    let mut group = c.benchmark_group("caputo_profile");
    group.sample_size(20);
    for n in [257, 1025] {
        let x = sine(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| caputo_profile(black_box(x), FractionalOrder::HALF, Side::Right).unwrap())
        });
    }
    group.finish();
}

fn composition(c: &mut Criterion) {
    let x = sine(513);
    c.bench_function("compose_rl_after_caputo_half/513", |b| {
        b.iter(|| compose_rl_after_caputo_half(black_box(&x), 0.5).unwrap())
    });
}

criterion_group!(benches, point_values, profiles, composition);
criterion_main!(benches);
