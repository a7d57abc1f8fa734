use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use linsem_core::config::Config;
use linsem_core::constraints::{discover_constraints, minor_constraints, DiscoveryOptions};
use linsem_core::decomposition::{mixed_components, tian_tau_all};
use linsem_core::graph::examples;
use linsem_core::identifiability::{global_id, htc_identifiable, identify};
use linsem_core::numerics::{multistart_fiber, sample_params, trial_rng};
use linsem_core::parametrization::{phi_numeric, phi_symbolic};
use linsem_core::separation::trek_separation_rank;
use linsem_core::MixedGraph;

fn random_graphs(n: usize, count: usize) -> Vec<MixedGraph> {
    let mut rng = trial_rng(42, n as u64);
    (0..count).map(|_| MixedGraph::random(n, 0.4, 0.3, true, &mut rng)).collect()
}

fn parametrization(c: &mut Criterion) {
    let mut group = c.benchmark_group("parametrization");
    let g = examples::tian_example();
    let p = sample_params(&g, 1, 1.0);
    group.bench_function("numeric_tian", |b| b.iter(|| phi_numeric(black_box(&g), black_box(&p))));
    for (name, g) in [("verma", examples::verma()), ("cyclic_two_instruments", examples::cyclic_two_instruments())] {
        group.bench_function(BenchmarkId::new("symbolic", name), |b| b.iter(|| phi_symbolic(black_box(&g), 8)));
    }
    group.finish();
}

fn identifiability(c: &mut Criterion) {
    let mut group = c.benchmark_group("identifiability");
    for n in [6, 10, 14] {
        let graphs = random_graphs(n, 8);
        group.bench_with_input(BenchmarkId::new("global", n), &graphs, |b, gs| {
            b.iter(|| gs.iter().map(global_id).filter(|v| v.injective).count())
        });
        group.bench_with_input(BenchmarkId::new("htc_sufficient", n), &graphs, |b, gs| {
            b.iter(|| gs.iter().map(|g| htc_identifiable(g, 0)).filter(|a| a.sufficient()).count())
        });
    }
    let cfg = Config::default();
    let g = examples::htc_gap_a();
    group.bench_function("identify_htc_gap_a", |b| b.iter(|| identify(black_box(&g), &cfg)));
    group.bench_function("fiber_multistart_cycle3", |b| {
        let g = examples::directed_cycle(3);
        let s = phi_numeric(&g, &sample_params(&g, 7, 1.0)).unwrap();
        b.iter(|| multistart_fiber(black_box(&g), &s, 50, &mut trial_rng(7, 0), &cfg.newton).len())
    });
    group.finish();
}

fn separation(c: &mut Criterion) {
    let mut group = c.benchmark_group("separation");
    let spider = examples::spider();
    let a = [0, 1, 2, 3].into_iter().collect();
    let cc = [4, 5, 6].into_iter().collect();
    group.bench_function("trek_sep_spider", |b| b.iter(|| trek_separation_rank(black_box(&spider), &a, &cc)));
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decomposition");
    let g = examples::tian_example();
    let dec = mixed_components(&g);
    let s = phi_numeric(&g, &sample_params(&g, 3, 1.0)).unwrap();
    group.bench_function("components_tian", |b| b.iter(|| mixed_components(black_box(&g))));
    group.bench_function("tau_tian", |b| b.iter(|| tian_tau_all(black_box(&g), &s, &dec)));
    group.finish();
}

fn constraints(c: &mut Criterion) {
    let mut group = c.benchmark_group("constraints");
    group.sample_size(10);
    let cfg = Config::default();
    let opts = DiscoveryOptions::default();
    for (name, g) in [("diamond", examples::diamond_dag()), ("verma_with_sink", examples::verma_with_sink())] {
        group.bench_function(BenchmarkId::new("discover", name), |b| b.iter(|| discover_constraints(&g, &opts, &cfg)));
    }
    let spider = examples::spider();
    group.bench_function("minors_spider_2x2", |b| b.iter(|| minor_constraints(black_box(&spider), 2, 8)));
    group.finish();
}

criterion_group!(benches, parametrization, identifiability, separation, decomposition, constraints);
criterion_main!(benches);
