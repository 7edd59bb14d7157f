//! Benchmarks for the hot paths: the closed-form gain average, both
//! connection-probability routes, the rate quadrature, and the Monte Carlo
//! trial loop.  Sample sizes are kept small so a full run stays under a
//! minute on one core.

use std::f64::consts::PI;
use std::time::Duration;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use beamnet::analytic::{connection_probability, data_rate, gain_integral};
use beamnet::{
    estimate_connection_probability, AntennaPattern, LinkGeometry, QuadratureSpec,
    SimulationConfig, SystemParams,
};

fn reference_link() -> LinkGeometry {
    LinkGeometry {
        distance: 0.4,
        angular_position: 0.0,
        orientation: PI,
    }
}

fn bench_gain_average(c: &mut Criterion) {
    let mut group = c.benchmark_group("gain_average");
    for directivity in [0.0, 0.5, 0.99] {
        group.bench_with_input(
            BenchmarkId::from_parameter(directivity),
            &directivity,
            |bencher, &d| bencher.iter(|| gain_integral(black_box(4.0), black_box(d)).unwrap()),
        );
    }
    group.finish();
}

fn bench_connection_probability(c: &mut Criterion) {
    let mut group = c.benchmark_group("connection_probability");
    let pattern = AntennaPattern::single_lobe(0.7);
    let link = reference_link();

    let closed = SystemParams::default();
    group.bench_function("closed_form", |bencher| {
        bencher.iter(|| {
            connection_probability(black_box(&closed), &link, &pattern, &pattern).unwrap()
        })
    });

    let mut offset = SystemParams::default();
    offset.pathloss_offset = 0.1;
    group.bench_function("quadrature_fallback", |bencher| {
        bencher.iter(|| {
            connection_probability(black_box(&offset), &link, &pattern, &pattern).unwrap()
        })
    });
    group.finish();
}

fn bench_data_rate(c: &mut Criterion) {
    let params = SystemParams::default();
    let pattern = AntennaPattern::single_lobe(0.7);
    let link = reference_link();
    let quadrature = QuadratureSpec::default();
    c.bench_function("data_rate", |bencher| {
        bencher.iter(|| {
            data_rate(black_box(&params), &link, &pattern, &pattern, &quadrature).unwrap()
        })
    });
}

fn bench_simulation(c: &mut Criterion) {
    let config = SimulationConfig {
        trials: 256,
        ..SimulationConfig::default()
    };
    let link = reference_link();
    c.bench_function("simulate_256_trials", |bencher| {
        bencher.iter(|| estimate_connection_probability(black_box(&config), &link).unwrap())
    });
}

fn quick() -> Criterion {
    Criterion::default()
        .sample_size(10)
        .warm_up_time(Duration::from_millis(300))
        .measurement_time(Duration::from_millis(900))
}

criterion_group! {
    name = benches;
    config = quick();
    targets = bench_gain_average, bench_connection_probability, bench_data_rate, bench_simulation
}
criterion_main!(benches);
