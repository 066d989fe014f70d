//! Benchmark bodies for the core kernels, shared by the `kernels` bench.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, Throughput};
use dipolar::dynamics::{run_direct_gate, run_inverted_gate, InteractionSpec, LevelScheme};
use dipolar::geometry::{phase_error_monte_carlo, DipoleGeometry, GeometryDistribution};
use dipolar::molecules::{hyperfine_levels, preset};
use dipolar::{Quantity, Unit};

fn q(v: f64, u: Unit) -> Quantity {
    Quantity::new(v, u).expect("finite")
}

pub fn geometry(c: &mut Criterion) {
    let mean = DipoleGeometry::equilibrium(q(500.0, Unit::Nanometer), q(1.37, Unit::Debye), q(1.37, Unit::Debye))
        .expect("valid geometry");
    let dist = GeometryDistribution {
        sigma_r: 1.5e-7,
        sigma_theta: 0.05,
        sigma_theta1: 0.1,
        sigma_theta2: 0.1,
        ..GeometryDistribution::fixed(mean)
    };
    let mut g = c.benchmark_group("phase_error_monte_carlo");
    for n in [10_000usize, 100_000] {
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| phase_error_monte_carlo(black_box(&dist), q(1.0, Unit::Second), n, 7).expect("estimate"))
        });
    }
    g.finish();
}

pub fn dynamics(c: &mut Criterion) {
    let omega = q(1e5, Unit::RadPerSecond);
    let direct = LevelScheme::direct(q(1.37, Unit::Debye), None).expect("scheme");
    c.bench_function("direct_gate", |b| {
        b.iter(|| run_direct_gate(&direct, &InteractionSpec::blockade(black_box(1.78e6)), omega, omega).expect("gate"))
    });
    let inverted = LevelScheme::inverted(q(5.5, Unit::Debye), q(-0.45, Unit::Debye), None).expect("scheme");
    let inter = InteractionSpec { u_gg: 4.5e5, u_e1: 3.7e4, ..InteractionSpec::default() };
    c.bench_function("inverted_gate", |b| {
        b.iter(|| {
            run_inverted_gate(&inverted, black_box(&inter), q(6e4, Unit::RadPerSecond), omega, true).expect("gate")
        })
    });
}

pub fn hyperfine(c: &mut Criterion) {
    let bai = preset("BaI").expect("preset");
    let mut g = c.benchmark_group("hyperfine_levels");
    for n_max in [2u32, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(n_max), &n_max, |b, &n| {
            b.iter(|| hyperfine_levels(black_box(&bai), n).expect("levels"))
        });
    }
    g.finish();
}
