use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use spdc_core::{
    conditional_mode, coupling_efficiency_numeric, radial_profile, synthesize_ring, Arm,
    ExperimentConfig,
};

fn projection(c: &mut Criterion) {
    let config = ExperimentConfig::default().with_focusing(0.1).unwrap();
    let s = config.setup().unwrap();
    c.bench_function("conditional_mode_xi_0.1", |b| {
        b.iter(|| conditional_mode(black_box(&s.joint), &s.mode_i, Arm::Signal).unwrap())
    });
    c.bench_function("coupling_report_xi_0.1", |b| {
        b.iter(|| coupling_efficiency_numeric(black_box(&s.joint), &s.mode_s, &s.mode_i).unwrap())
    });
}

fn rings(c: &mut Criterion) {
    let config = ExperimentConfig::default().with_focusing(0.4).unwrap();
    let mut group = c.benchmark_group("ring");
    group.sample_size(10);
    group.bench_function("synthesize_128", |b| {
        b.iter(|| synthesize_ring(black_box(&config), 128).unwrap())
    });
    let img = synthesize_ring(&config, 256).unwrap();
    group.bench_function("radial_profile_256", |b| {
        b.iter(|| radial_profile(black_box(&img), 0.7, 512).unwrap())
    });
    group.finish();
}

criterion_group!(benches, projection, rings);
criterion_main!(benches);
