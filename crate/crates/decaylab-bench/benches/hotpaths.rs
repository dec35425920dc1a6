//! Microbenchmarks for the numerical hot paths: weight and conjugate
//! evaluation, kernel inversion, envelope sampling, damped time stepping,
//! and the observation quadrature.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use decaylab::obscheck::observation_functional;
use decaylab::wavesim::solve;
use decaylab::{
    CoefficientField, DampingLaw, DecayEnvelope, DecayKernel, Dynamics, EnvelopeSpec, GrowthSpec,
    InitialData, Scheme, WaveConfig, WeightSystem,
};

fn cubic_system() -> WeightSystem {
    WeightSystem::new(DampingLaw::power(3.0, None).unwrap(), 1.0).unwrap()
}

fn bench_weight(c: &mut Criterion) {
    let ws = cubic_system();
    c.bench_function("weight_f interior", |b| {
        b.iter(|| ws.weight_f(black_box(0.37)).unwrap());
    });
    c.bench_function("conjugate_r stationary", |b| {
        b.iter(|| ws.conjugate_r(black_box(1.3)).unwrap());
    });
}

fn bench_kernel(c: &mut Criterion) {
    let env = EnvelopeSpec::new(2.0, 0.5, 1.0, 0.4, 0.5).unwrap();
    let kernel = DecayKernel::new(cubic_system(), GrowthSpec::identity(), &env).unwrap();
    // warm the ladder so the measurement sees the steady-state cached path
    kernel.psi_inverse(2e6).unwrap();
    c.bench_function("psi_inverse warm", |b| {
        b.iter(|| kernel.psi_inverse(black_box(12345.6)).unwrap());
    });
    let envelope = DecayEnvelope::new(cubic_system(), GrowthSpec::identity(), env).unwrap();
    envelope.eval(2e6).unwrap();
    c.bench_function("envelope eval warm", |b| {
        b.iter(|| envelope.eval(black_box(512.0)).unwrap());
    });
}

fn bench_leapfrog(c: &mut Criterion) {
    let config = WaveConfig {
        n: 256,
        dt: 1.0 / 257.0,
        t_final: 64.0 / 257.0,
        scheme: Scheme::Leapfrog,
        modes: 256,
        dynamics: Dynamics::NonlinearDamped,
        law: DampingLaw::power(3.0, None).unwrap(),
        field: CoefficientField::constant(1.0).unwrap(),
        stride: 64,
    };
    let data = InitialData::single_mode(1, 0.0, 3.0);
    c.bench_function("leapfrog 64 steps n=256", |b| {
        b.iter(|| solve(black_box(&config), &data, None).unwrap());
    });
}

fn bench_observation(c: &mut Criterion) {
    let field = CoefficientField::constant(1.0).unwrap();
    let data = InitialData::single_mode(3, 1.0, 0.5);
    c.bench_function("observation functional 256 panels", |b| {
        b.iter(|| observation_functional(&field, black_box(&data), 128, 2.0, 256).unwrap());
    });
}

criterion_group!(benches, bench_weight, bench_kernel, bench_leapfrog, bench_observation);
criterion_main!(benches);
