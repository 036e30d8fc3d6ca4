use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optsearch::data::gen_uniform_vectors;
use optsearch::rng::rng_from_seed;
use optsearch::*;
use rand::Rng;

fn instance(n: usize, d: usize) -> (DistanceMatrix, QueryDistances) {
    let ds = gen_uniform_vectors(n, d, 7, MetricKind::euclidean()).unwrap();
    let dm = build_distance_matrix(&ds).unwrap();
    let mut rng = rng_from_seed(8);
    let q = Object::Vector((0..d).map(|_| rng.gen::<f64>()).collect());
    let qd = QueryDistances::from_query(&ds, &q).unwrap();
    (dm, qd)
}

fn elimination(c: &mut Criterion) {
    let mut group = c.benchmark_group("elimination_graph");
    for n in [250, 1000] {
        let (dm, qd) = instance(n, 5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| build_elimination_graph(&dm, &qd, QuerySpec::knn_optimum(5)).unwrap())
        });
    }
    group.finish();
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_domset");
    for n in [250, 1000] {
        let (dm, qd) = instance(n, 5);
        let g = build_elimination_graph(&dm, &qd, QuerySpec::knn_optimum(5)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| exact_domset(&g.graph, SolverLimits::default()))
        });
    }
    group.finish();
}

fn searches(c: &mut Criterion) {
    let (dm, qd) = instance(1000, 5);
    let mut group = c.benchmark_group("knn_search_k5");
    for s in [
        Strategy::Aesa,
        Strategy::Iaesa2,
        Strategy::Gaesa,
        Strategy::Oracle,
    ] {
        group.bench_function(s.token(), |b| {
            b.iter(|| run_knn_search(s, &dm, &qd, 5, true).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, elimination, exact, searches);
criterion_main!(benches);
