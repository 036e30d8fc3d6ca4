#![allow(dead_code)]

use optsearch::rng::{rng_from_seed, Rng};
use optsearch::*;
use rand::Rng as _;

/// Five points at L1 distance 8 from the origin plus a pivot `p`, which is
/// object 0.
pub fn l1_ring(p: (f64, f64)) -> (DistanceMatrix, QueryDistances) {
    let mut objs = vec![Object::Vector(vec![p.0, p.1])];
    for i in 1..=5 {
        objs.push(Object::Vector(vec![1.0 + i as f64, 7.0 - i as f64]));
    }
    let ds = Dataset::new(objs, MetricKind::manhattan()).unwrap();
    let dm = build_distance_matrix(&ds).unwrap();
    let qd = QueryDistances::from_query(&ds, &Object::Vector(vec![0.0, 0.0])).unwrap();
    (dm, qd)
}

/// External labels of the nine plane points, in object order.
pub const PLANE_LABELS: [usize; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 10];
pub const PLANE_RADIUS: f64 = 5.127083089556588;

/// Expected elimination edges, in external labels.
pub const PLANE_EDGES: [(usize, usize); 10] = [
    (3, 1),
    (10, 1),
    (4, 3),
    (3, 5),
    (10, 3),
    (4, 5),
    (4, 7),
    (5, 7),
    (7, 5),
    (10, 8),
];

pub fn plane() -> (DistanceMatrix, QueryDistances) {
    let pts = [
        (3.732886157216435, 0.3549838538817218),
        (7.939504727723011, 0.5322674524966186),
        (1.1588123954315703, 1.622988764034955),
        (9.910698259877051, 2.4882154092025037),
        (2.5018709565510746, 4.174377590352696),
        (6.539896044904356, 3.7207041770509033),
        (2.241320885523173, 6.288158229306186),
        (5.866025777076387, 6.393193053894219),
        (8.137267087234004, 6.7759220129894855),
    ];
    let objs = pts
        .iter()
        .map(|&(x, y)| Object::Vector(vec![x, y]))
        .collect();
    let ds = Dataset::new(objs, MetricKind::euclidean()).unwrap();
    let dm = build_distance_matrix(&ds).unwrap();
    let q = Object::Vector(vec![9.781976957678093, 4.8523612977115445]);
    let qd = QueryDistances::from_query(&ds, &q).unwrap();
    (dm, qd)
}

pub fn plane_edges() -> Vec<(usize, usize)> {
    let idx = |label: usize| PLANE_LABELS.iter().position(|&l| l == label).unwrap();
    let mut e: Vec<(usize, usize)> = PLANE_EDGES.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
    e.sort_unstable();
    e
}

pub fn random_digraph(rng: &mut Rng, n: usize, p: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    DirectedGraph::new(n, edges).unwrap()
}

pub fn random_undirected(rng: &mut Rng, n: usize, p: f64) -> UndirectedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    UndirectedGraph::new(n, edges).unwrap()
}

pub fn uniform_vector(rng: &mut Rng, d: usize) -> Object {
    Object::Vector((0..d).map(|_| rng.gen::<f64>()).collect())
}

/// Uniform points in `[0,1)^d` with a fresh uniform query.
pub fn uniform_instance(
    seed: u64,
    n: usize,
    d: usize,
) -> (Dataset, DistanceMatrix, QueryDistances) {
    let mut rng = rng_from_seed(seed);
    let objs = (0..n).map(|_| uniform_vector(&mut rng, d)).collect();
    let ds = Dataset::new(objs, MetricKind::euclidean()).unwrap();
    let dm = build_distance_matrix(&ds).unwrap();
    let q = uniform_vector(&mut rng, d);
    let qd = QueryDistances::from_query(&ds, &q).unwrap();
    (ds, dm, qd)
}

/// Distance matrix over the dataset with the query appended as the last
/// point.
pub fn with_query(ds: &Dataset, q: &Object) -> DistanceMatrix {
    let mut objs = ds.objects().to_vec();
    objs.push(q.clone());
    let all = Dataset::new(objs, ds.metric().clone()).unwrap();
    build_distance_matrix(&all).unwrap()
}

/// `max_S δ <= min_{not S} δ` for a result of size `k`.
pub fn is_valid_knn(qd: &QueryDistances, result: &[usize], k: usize) -> bool {
    if result.len() != k {
        return false;
    }
    let d = qd.all();
    let worst = result
        .iter()
        .map(|&i| d[i])
        .fold(f64::NEG_INFINITY, f64::max);
    (0..d.len())
        .filter(|i| !result.contains(i))
        .all(|i| d[i] >= worst)
}

pub fn ln_factor(n: usize) -> f64 {
    (n as f64).ln() + 1.0
}
