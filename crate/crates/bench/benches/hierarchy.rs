use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use psurf::claws::{euler_trivial, g_sequence, hierarchy};
use psurf::structure::check_all;
use psurf::symcore::parse_normal;
use psurf_bench::{mkdv, sine_gordon};

fn bench_g_sequence(c: &mut Criterion) {
    let (qr, m) = mkdv();
    let mut group = c.benchmark_group("g_sequence/mkdv");
    for n in [4usize, 8, 12] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| g_sequence(black_box(&qr), &m, n).unwrap())
        });
    }
    group.finish();
}

fn bench_hierarchy(c: &mut Criterion) {
    let (qr, m) = mkdv();
    c.bench_function("hierarchy/mkdv/8", |b| b.iter(|| hierarchy(black_box(&qr), &m, 8, false).unwrap()));
    let (qr, m) = sine_gordon();
    c.bench_function("hierarchy/sine-gordon/6", |b| b.iter(|| hierarchy(black_box(&qr), &m, 6, false).unwrap()));
}

fn bench_structure(c: &mut Criterion) {
    let (qr, m) = sine_gordon();
    c.bench_function("check_all/sine-gordon", |b| b.iter(|| check_all(black_box(&qr), None, &m).unwrap()));
}

fn bench_euler(c: &mut Criterion) {
    let (qr, m) = mkdv();
    let gs = g_sequence(&qr, &m, 8).unwrap();
    c.bench_function("euler_trivial/g8", |b| b.iter(|| euler_trivial(black_box(gs.get(8)), &m).unwrap()));
}

fn bench_normalize(c: &mut Criterion) {
    let text = "(q^3*q_xx - eta*q_x^2)/(q^2 + eta) + (q_x*eta - q^3)^3/(q + eta)^2";
    c.bench_function("parse_normal/rational", |b| b.iter(|| parse_normal(black_box(text)).unwrap()));
}

criterion_group!(benches, bench_g_sequence, bench_hierarchy, bench_structure, bench_euler, bench_normalize);
criterion_main!(benches);
