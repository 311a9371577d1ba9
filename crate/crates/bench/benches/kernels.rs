use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use magspace_core::energy::EnergyFunctional;
use magspace_core::fields::{sample_field, FieldSpec};
use magspace_core::gauge::coulomb_gauge;
use magspace_core::minimize::Initializer;
use magspace_core::{GridSpec, Region};

fn gauge(c: &mut Criterion) {
    let mut group = c.benchmark_group("coulomb_gauge");
    group.sample_size(10);
    for n in [65, 129, 257] {
        let grid = GridSpec::new(12.0, n).unwrap();
        let b = sample_field(&FieldSpec::unit_gaussian(), &grid).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &b, |bench, b| {
            bench.iter(|| coulomb_gauge(black_box(b)).unwrap())
        });
    }
    group.finish();
}

fn energy_and_gradient(c: &mut Criterion) {
    let mut group = c.benchmark_group("energy_gradient");
    for n in [65, 129, 257] {
        let grid = GridSpec::new(12.0, n).unwrap();
        let b = sample_field(&FieldSpec::unit_gaussian(), &grid).unwrap();
        let a = coulomb_gauge(&b).unwrap().potential;
        let psi = Initializer::RandomPerturbation {
            amplitude: 0.2,
            seed: 1,
        }
        .build(&grid)
        .unwrap();
        let functional = EnergyFunctional::new(&a, &Region::FullSquare).unwrap();
        let mut g = vec![Default::default(); grid.len()];
        group.bench_function(BenchmarkId::from_parameter(n), |bench| {
            bench.iter(|| functional.evaluate(black_box(psi.values()), Some(&mut g)))
        });
    }
    group.finish();
}

criterion_group!(benches, gauge, energy_and_gradient);
criterion_main!(benches);
