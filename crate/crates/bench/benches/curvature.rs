use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use curvegraph::crofton::{crofton_ntc, Scheme};
use curvegraph::curvature::ntc_total;
use curvegraph::double_cover::{double, euler_circuit};
use curvegraph::inscribe::planar_theta;
use curvegraph::minimizer::{flat_min, Family};
use curvegraph::random::random_star;
use curvegraph::sampling::rng;
use curvegraph::vertex::{ctc_vertex, ntc_vertex};

fn vertex(c: &mut Criterion) {
    let mut g = c.benchmark_group("vertex");
    for d in [3, 6, 10] {
        let s = random_star(&mut rng(d as u64, 0), d);
        g.bench_with_input(BenchmarkId::new("ntc", d), &s, |b, s| b.iter(|| ntc_vertex(black_box(s))));
        g.bench_with_input(BenchmarkId::new("ctc", d), &s, |b, s| b.iter(|| ctc_vertex(black_box(s))));
    }
    g.finish();
}

fn graph(c: &mut Criterion) {
    let theta = planar_theta(256).unwrap();
    c.bench_function("ntc_total/theta256", |b| b.iter(|| ntc_total(black_box(&theta))));
    let k4 = Family::Complete { m: 4 }.embed().unwrap();
    c.bench_function("crofton/k4_10k", |b| b.iter(|| crofton_ntc(black_box(&k4), Scheme::Mc, 10_000, 1).unwrap()));
    let dg = double(&Family::Complete { m: 6 }.combinatorial().unwrap());
    c.bench_function("euler_circuit/k6", |b| b.iter(|| euler_circuit(black_box(&dg), true, 3).unwrap()));
}

fn minimizer(c: &mut Criterion) {
    let mut g = c.benchmark_group("flat_min");
    g.sample_size(10);
    for f in ["complete:6", "ladder:4", "triple_circles"] {
        let cg = f.parse::<Family>().unwrap().combinatorial().unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(f), &cg, |b, cg| b.iter(|| flat_min(black_box(cg)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, vertex, graph, minimizer);
criterion_main!(benches);
