use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use levyk::density::{default_grid, density_split};
use levyk::exponent::ExponentTable;
use levyk::par;
use levyk::profiles::{KappaClass, LevyModel, ProfileSpec};

fn model() -> LevyModel {
    let kappa = KappaClass::PolyLog { alpha1: 0.5, alpha2: 0.0 };
    LevyModel::symmetric(1, ProfileSpec { kappa, m: 1.0, beta: 1.0, delta: 1.25, c: None }).unwrap()
}

fn bench(c: &mut Criterion) {
    let m = model();
    let table = ExponentTable::for_model(&m).unwrap();
    let grid = default_grid(&m, &table, 0.1).unwrap();

    let mut g = c.benchmark_group("exponent_table");
    g.sample_size(10);
    for (name, seq) in [("parallel", false), ("sequential", true)] {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_sequential(seq);
            b.iter(|| ExponentTable::with_range(&m, 1e-2, 1e4).unwrap());
        });
    }
    g.finish();

    let mut g = c.benchmark_group("density_split");
    g.sample_size(10);
    for (name, seq) in [("parallel", false), ("sequential", true)] {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_sequential(seq);
            b.iter(|| density_split(&m, &table, 0.1, &grid, None).unwrap());
        });
    }
    g.finish();
    par::set_sequential(false);
}

criterion_group!(benches, bench);
criterion_main!(benches);
