use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lamehardy_bench::{cubic_jet, sphere};
use lamehardy_core::geometry::build_ball_volume;
use lamehardy_core::poly::PolyField;
use lamehardy_core::volume::{teodorescu, Teodorescu, VolumeSampleField};
use lamehardy_core::{lame_cauchy_integral, singular_sl, LameParams};

fn cauchy_integral(c: &mut Criterion) {
    let p = LameParams::default();
    let mut group = c.benchmark_group("lame_cauchy_integral");
    for level in [2, 3, 4] {
        let jet = cubic_jet(&sphere(level));
        group.bench_with_input(BenchmarkId::from_parameter(level), &level, |bench, _| {
            bench.iter(|| lame_cauchy_integral(&jet, &p, black_box(&[0.2, -0.1, 0.3])).unwrap())
        });
    }
    group.finish();
}

fn singular_operator(c: &mut Criterion) {
    let p = LameParams::default();
    let mut group = c.benchmark_group("singular_sl");
    group.sample_size(10);
    for level in [1, 2, 3] {
        let jet = cubic_jet(&sphere(level));
        group.bench_with_input(BenchmarkId::from_parameter(level), &level, |bench, _| {
            bench.iter(|| singular_sl(black_box(&jet), &p))
        });
    }
    group.finish();
}

fn volume_potential(c: &mut Criterion) {
    let p = LameParams::default();
    let grid = build_ball_volume(3, 16, 1.0, &[0.0; 3]).unwrap();
    let f = PolyField::random(3, 2, 5).unwrap();
    let samples = VolumeSampleField::from_poly(&grid, &f).unwrap();
    c.bench_function("teodorescu_lame_res16", |bench| {
        bench.iter(|| teodorescu(&samples, Teodorescu::L, &p, black_box(&[1.5, 0.0, 0.0])).unwrap())
    });
}

criterion_group!(
    benches,
    cauchy_integral,
    singular_operator,
    volume_potential
);
criterion_main!(benches);
