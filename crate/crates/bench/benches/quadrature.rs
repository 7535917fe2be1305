use std::hint::black_box;

use cosub_core::certificates::{subnormality_report, ReportConfig};
use cosub_core::operators::{gram_block_matrix, moment_sequence};
use cosub_core::quadrature::{evaluable_inner_product, inner_product, AdaptiveOptions};
use cosub_core::*;
use criterion::{criterion_group, criterion_main, Criterion};

fn rotation(theta: f64, s: f64) -> MatrixSymbol {
    let (sn, cs) = theta.sin_cos();
    MatrixSymbol::from_row_slice(2, &[s * cs, -s * sn, s * sn, s * cs]).unwrap()
}

fn quadrature(c: &mut Criterion) {
    let fs = ReportConfig::default_test_functions(2).unwrap();
    let exp3 = WeightedMeasure::direct(WeightSeries::exp().truncate(3).unwrap(), InnerProduct::identity(2));
    c.bench_function("hermite inner product, 2d, gamma_3", |b| {
        b.iter(|| inner_product(black_box(&fs[2]), black_box(&fs[3]), &exp3).unwrap())
    });
    let recip = WeightedMeasure::reciprocal(WeightSeries::polynomial(vec![1.0, 1.0]).unwrap(), InnerProduct::identity(2));
    let opts = AdaptiveOptions::default();
    c.bench_function("adaptive inner product, 2d, 1/(1+t)", |b| {
        b.iter(|| evaluable_inner_product(black_box(&fs[0]), black_box(&fs[3]), &recip, &opts).unwrap())
    });
}

fn operators(c: &mut Criterion) {
    let fs = ReportConfig::default_test_functions(2).unwrap();
    let mu = WeightedMeasure::direct(WeightSeries::exp().truncate(5).unwrap(), InnerProduct::identity(2));
    let op = CompositionOperatorRep::new(rotation(0.7, 1.2), mu).unwrap();
    c.bench_function("moment sequence, 13 moments", |b| {
        b.iter(|| moment_sequence(&op, black_box(&fs[3]), 12).unwrap())
    });
    c.bench_function("bram matrix, dictionary 4, maxpow 3", |b| {
        b.iter(|| gram_block_matrix(&op, black_box(&fs), 3).unwrap())
    });
    let mut cfg = ReportConfig::new(fs.clone());
    cfg.falsification = None;
    cfg.include_limit = false;
    let mut group = c.benchmark_group("reports");
    group.sample_size(10);
    group.bench_function("subnormality report, 5 levels", |b| {
        b.iter(|| subnormality_report(&rotation(0.7, 1.2), &InnerProduct::identity(2), &WeightSeries::exp(), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, quadrature, operators);
criterion_main!(benches);
