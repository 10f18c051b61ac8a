use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use selfsim_core::automaton::catalog;
use selfsim_core::dynamics::{cesaro_average, LazyWreathElement, LetterDistribution};
use selfsim_core::haar::{HaarSampler, SamplerSource};
use selfsim_core::nucleus::compute_nucleus;
use selfsim_core::quotients::{enumerate_quotient, AutomatonGroup, GroupSource, DEFAULT_CAP};
use selfsim_core::{ConeSpec, PermGroup};

fn compose(c: &mut Criterion) {
    let mut group = c.benchmark_group("compose");
    for depth in [8, 12, 16] {
        let mut sampler = HaarSampler::new(SamplerSource::WreathPortrait(PermGroup::symmetric(2).unwrap()), 1);
        let g = sampler.sample(depth).unwrap();
        let h = sampler.sample(depth).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, _| {
            b.iter(|| black_box(&g).compose(black_box(&h)).unwrap())
        });
    }
    group.finish();
}

fn enumerate(c: &mut Criterion) {
    let source = AutomatonGroup::new(catalog("grigorchuk").unwrap()).unwrap();
    let mut group = c.benchmark_group("enumerate_grigorchuk");
    group.sample_size(10);
    for depth in [3, 4] {
        let gens = source.generators(depth).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, &d| {
            b.iter(|| enumerate_quotient(2, d, gens.clone(), DEFAULT_CAP).unwrap().order())
        });
    }
    group.finish();
}

fn nucleus(c: &mut Criterion) {
    let mut group = c.benchmark_group("nucleus");
    for name in ["grigorchuk", "basilica", "bsv"] {
        let aut = catalog(name).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| compute_nucleus(&aut, 512, 64).unwrap().members.len())
        });
    }
    group.finish();
}

fn cesaro(c: &mut Criterion) {
    let h = PermGroup::symmetric(2).unwrap();
    let cone = ConeSpec::stabilizer(2, 1);
    let dist = LetterDistribution::uniform(2);
    let mut group = c.benchmark_group("cesaro_wreath2");
    group.sample_size(10);
    for n in [10, 14] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| {
                let g = LazyWreathElement::new(h.clone(), 7, 0);
                cesaro_average(&g, &cone, n, &dist).unwrap().values.len()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, compose, enumerate, nucleus, cesaro);
criterion_main!(benches);
