use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use metrize::aharoni::aharoni_embed;
use metrize::covers::au_metrize;
use metrize::invlim::threads;
use metrize::quotient::chain_metric;
use metrize::ChainLength;
use metrize_bench::{quotient_input, sequence, truncation, unit_space};

fn chain(c: &mut Criterion) {
    let mut g = c.benchmark_group("chain_metric");
    for n in [8, 16, 32] {
        let (m, f) = quotient_input(n);
        g.bench_with_input(BenchmarkId::new("d3", n), &n, |b, _| b.iter(|| chain_metric(&m, &f, ChainLength::Finite(3))));
        g.bench_with_input(BenchmarkId::new("dinf", n), &n, |b, _| b.iter(|| chain_metric(&m, &f, ChainLength::Infinite)));
    }
    g.finish();
}

fn metrization(c: &mut Criterion) {
    let mut g = c.benchmark_group("au_metrize");
    for ground in [4, 8, 12] {
        let seq = sequence(ground, 6);
        g.bench_with_input(BenchmarkId::from_parameter(ground), &ground, |b, _| b.iter(|| au_metrize(&seq)));
    }
    g.finish();
}

fn embedding(c: &mut Criterion) {
    let mut g = c.benchmark_group("aharoni_embed");
    for n in [4, 8, 16] {
        let m = unit_space(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| aharoni_embed(&m, 4)));
    }
    g.finish();
}

fn thread_enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("threads");
    for depth in [4, 8, 16] {
        let t = truncation(depth, 6);
        g.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, _| b.iter(|| threads(&t)));
    }
    g.finish();
}

criterion_group!(benches, chain, metrization, embedding, thread_enumeration);
criterion_main!(benches);
