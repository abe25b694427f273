use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use revol_core::gof::{bootstrap_pvalues, BootstrapOptions};
use revol_core::memory::{box_size_grid, dfa_fluctuation, profile};
use revol_core::sefit::{
    constrained_params, fit_mle_values, sample_from_fit, FitOptions, StretchedExpParams,
};
use revol_core::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn model() -> StretchedExpParams {
    let (a, _) = constrained_params(0.35).unwrap();
    StretchedExpParams::truncated(a / 4.0, 0.35, 2.0).unwrap()
}

fn bootstrap(c: &mut Criterion) {
    let p = model();
    let data = sample_from_fit(&p, 1000, 1);
    let mut group = c.benchmark_group("bootstrap_500x1000");
    group.sample_size(10);
    for (name, execution) in MODES {
        let opts = BootstrapOptions {
            n_boot: 500,
            seed: 2,
            execution,
            ..BootstrapOptions::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| bootstrap_pvalues(&data, &p, &opts).unwrap())
        });
    }
    group.finish();
}

fn cutoff_scan(c: &mut Criterion) {
    let data: Vec<f64> = sample_from_fit(&model(), 2000, 3)
        .iter()
        .map(|x| x.ceil())
        .collect();
    let mut group = c.benchmark_group("cutoff_scan_2000");
    group.sample_size(10);
    for (name, execution) in MODES {
        let opts = FitOptions {
            execution,
            ..FitOptions::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| fit_mle_values(&data, 10, opts).unwrap())
        });
    }
    group.finish();
}

fn dfa_sweep(c: &mut Criterion) {
    let series: Vec<Vec<f64>> = (0..8)
        .map(|k| sample_from_fit(&model(), 1 << 14, 10 + k))
        .collect();
    let mut group = c.benchmark_group("dfa_8x16384");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                execution.map(&series, |x| {
                    let grid = box_size_grid(x.len(), 20).unwrap();
                    dfa_fluctuation(&profile(x).unwrap(), &grid, 1).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bootstrap, cutoff_scan, dfa_sweep);
criterion_main!(benches);
