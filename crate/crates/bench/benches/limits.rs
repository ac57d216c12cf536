use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fracvar_core::limits::{caputo_ratio_limit, limit_equation_of_motion, WindowFamily};
use fracvar_core::models::FrictionModel;
use fracvar_core::varcalc::{action_gradient, action_gradient_fd, LagrangianSpec, Potential};
use fracvar_core::{AnalyticPack, FractionalOrder, Grid, Trajectory};

fn shifted_sine() -> Trajectory {
    Trajectory::from_pack(
        Grid::new(0.0, 2.0, 11).unwrap(),
        AnalyticPack::from_fns(vec![
            Box::new(|t: f64| (t + 1.0).sin()),
            Box::new(|t: f64| (t + 1.0).cos()),
            Box::new(|t: f64| -(t + 1.0).sin()),
        ]),
    )
    .unwrap()
}

fn ratio_limit(c: &mut Criterion) {
    let x = shifted_sine();
    let fam = WindowFamily::geometric(0.3, 0.1, 8, 0.5).unwrap();
    c.bench_function("caputo_ratio_limit/8x513", |b| {
        b.iter(|| caputo_ratio_limit(black_box(&x), FractionalOrder::HALF, &fam).unwrap())
    });
}

fn friction_limit(c: &mut Criterion) {
    let model = FrictionModel::new(1.0, 1.0, Potential::zero(), 0.0, 1.0).unwrap();
    let x = model
        .reference(2.0)
        .unwrap()
        .trajectory(Grid::new(0.0, 2.0, 11).unwrap())
        .unwrap();
    let spec = model.lagrangian().unwrap();
    let fam = WindowFamily::geometric(1.0, 0.1, 8, 0.5).unwrap();
    let mut group = c.benchmark_group("limit_equation_of_motion");
    group.sample_size(10);
    group.bench_function("friction/8x513", |b| {
        b.iter(|| limit_equation_of_motion(black_box(&spec), &x, &fam).unwrap())
    });
    group.finish();
}

fn gradients(c: &mut Criterion) {
    let grid = Grid::new(0.0, 1.0, 65).unwrap();
    let x = Trajectory::from_fn(grid, |t| t * (1.0 - t) + 0.2 * (3.0 * t).sin()).unwrap();
    let spec = LagrangianSpec::new(1.0, Potential::harmonic(0.5))
        .unwrap()
        .with_friction(1.0)
        .unwrap();
    let mut group = c.benchmark_group("action_gradient/65");
    group.bench_function("adjoint", |b| {
        b.iter(|| action_gradient(black_box(&spec), &x).unwrap())
    });
    group.sample_size(10);
    group.bench_function("finite_difference", |b| {
        b.iter(|| action_gradient_fd(black_box(&spec), &x, 1e-4).unwrap())
    });
    group.finish();
}

criterion_group!(benches, ratio_limit, friction_limit, gradients);
criterion_main!(benches);
