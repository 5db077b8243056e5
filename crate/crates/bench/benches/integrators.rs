use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use herglotz_core::dynamics::{
    integrate, integrate_with_reconstruction, EphExtField, EphField, LieMethod, LpjField, Method, Reconstruction,
    UnreducedHerglotzField,
};
use herglotz_core::jacobi::{bracket, bracket_observable, jacobi_identity_residual, BracketKind};
use herglotz_core::{exp_map, AlgebraVector, FullState};

fn algebra(c: &mut Criterion) {
    let v = AlgebraVector::new(0.3, -0.2, 0.9);
    c.bench_function("exp_map", |b| b.iter(|| exp_map(black_box(&v))));
    let tiny = AlgebraVector::new(1e-8, 0.0, 2e-8);
    c.bench_function("exp_map_small_angle", |b| b.iter(|| exp_map(black_box(&tiny))));
}

fn integrators(c: &mut Criterion) {
    let rb = herglotz_bench::damped_rigid_body();
    let lpj = LpjField::new(&rb.spec).unwrap();
    c.bench_function("lpj_rk4_1000_steps", |b| {
        b.iter(|| integrate(&lpj, black_box(rb.momentum()), 1e-3, 1000, Method::Rk4).unwrap())
    });
    let recon = Reconstruction(EphField::new(&rb.spec).unwrap());
    c.bench_function("eph_rkmk4_reconstruction_1000_steps", |b| {
        b.iter(|| integrate_with_reconstruction(&recon, black_box(rb.full_velocity()), 1e-3, 1000, LieMethod::Rkmk4).unwrap())
    });

    let top = herglotz_bench::heavy_top();
    c.bench_function("heavy_top_eph_ext_rk4_1000_steps", |b| {
        b.iter(|| integrate(&EphExtField(&top.spec), black_box(top.extended_velocity()), 1e-3, 1000, Method::Rk4).unwrap())
    });
    let full = FullState::new(top.g0, top.velocity);
    c.bench_function("heavy_top_unreduced_rkmk4_1000_steps", |b| {
        b.iter(|| {
            integrate_with_reconstruction(&UnreducedHerglotzField(&top.spec), black_box(full), 1e-3, 1000, LieMethod::Rkmk4)
                .unwrap()
        })
    });
}

fn brackets(c: &mut Criterion) {
    let (f, g, p) = herglotz_bench::bracket_inputs();
    c.bench_function("extended_bracket", |b| b.iter(|| bracket(BracketKind::Extended, &f, &g, black_box(&p))));
    let inner = bracket_observable(BracketKind::Extended, &f, &g);
    c.bench_function("nested_bracket", |b| b.iter(|| bracket(BracketKind::Extended, &f, &inner, black_box(&p))));
    let points = [p];
    c.bench_function("jacobi_residual_one_point", |b| {
        b.iter(|| jacobi_identity_residual(BracketKind::Extended, &f, &g, &f, black_box(&points)).unwrap())
    });
}

criterion_group!(benches, algebra, integrators, brackets);
criterion_main!(benches);
