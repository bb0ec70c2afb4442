use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use crystal_core::charsub::from_prime_constants;
use crystal_core::fmcount::orbit_count;
use crystal_core::{make_extension, ortho_group_elements, Budget, QuadraticSpace};

fn field_ops(c: &mut Criterion) {
    let f = make_extension(3, 12).unwrap();
    let x = f.element_at(12345);
    let y = f.element_at(54321);
    c.bench_function("gf3^12 mul", |b| b.iter(|| black_box(&x) * black_box(&y)));
    c.bench_function("gf3^12 inv", |b| b.iter(|| black_box(&x).inv()));
    c.bench_function("gf3^12 frobenius", |b| b.iter(|| black_box(&x).frobenius()));
}

fn isotropic(c: &mut Criterion) {
    let v = QuadraticSpace::standard(5, 2).unwrap();
    let budget = Budget::default();
    c.bench_function("enumerate isotropic p=5 sigma0=2", |b| b.iter(|| v.enumerate_isotropic(&budget).unwrap()));
}

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("from constants");
    g.sample_size(20);
    g.bench_function("p=3 sigma0=2 a=(1)", |b| b.iter(|| from_prime_constants(3, 2, black_box(&[1])).unwrap()));
    g.bench_function("p=3 sigma0=3 a=(1,1)", |b| b.iter(|| from_prime_constants(3, 3, black_box(&[1, 1])).unwrap()));
    g.finish();
}

fn groups(c: &mut Criterion) {
    let budget = Budget::default();
    let d = from_prime_constants(3, 3, &[0, 0]).unwrap();
    let mut g = c.benchmark_group("orthogonal group");
    g.sample_size(10);
    g.bench_function("elements p=3 sigma0=3 a=(0,0)", |b| b.iter(|| ortho_group_elements(&d, &budget).unwrap()));
    g.bench_function("orbits p=3 sigma0=3 a=(0,0)", |b| b.iter(|| orbit_count(&d, &budget).unwrap()));
    g.finish();
}

criterion_group!(benches, field_ops, isotropic, construction, groups);
criterion_main!(benches);
