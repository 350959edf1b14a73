use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use tanglefree::hypgeo::{j_kappa, verify_census, CensusShape, PantsModel};
use tanglefree::trace::{dilation_gap, h_l};
use tanglefree::{NumericVolumes, Signature, VolumeCache};

fn volumes(c: &mut Criterion) {
    let mut group = c.benchmark_group("volumes");
    group.sample_size(10);
    group.bench_function("exact (3,1) from scratch", |b| {
        b.iter(|| VolumeCache::new(12).recompute(black_box(Signature::new(3, 1).unwrap())).unwrap())
    });
    group.bench_function("numeric V_g up to g=8", |b| {
        b.iter(|| {
            let v = NumericVolumes::default();
            (2..=8).map(|g| v.volume_gn(g, 0).unwrap()).sum::<f64>()
        })
    });
    group.finish();
}

fn trace(c: &mut Criterion) {
    c.bench_function("h_L on 1000 points", |b| {
        b.iter(|| (0..1000).map(|i| h_l(black_box(-10.0 + 0.02 * i as f64), 10.0)).sum::<f64>())
    });
    c.bench_function("dilation gap", |b| b.iter(|| dilation_gap(black_box(3.0), 10.0).unwrap()));
}

fn hypgeo(c: &mut Criterion) {
    c.bench_function("j_kappa closed and direct", |b| b.iter(|| j_kappa(black_box(8.0), 0.5).unwrap()));
    let shape = CensusShape::new(0.5, 2.0, 6f64.exp()).unwrap();
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    let pants = PantsModel::from_lengths(0.6, 0.6, 3.0).unwrap();
    group.bench_function("pants words up to length 10", |b| b.iter(|| verify_census(&pants, &shape, 10).unwrap()));
    group.finish();
}

criterion_group!(benches, volumes, trace, hypgeo);
criterion_main!(benches);
