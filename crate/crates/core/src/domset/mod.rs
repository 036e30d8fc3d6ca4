//! Directed minimum dominating set.
//!
//! A vertex dominates itself and its out-neighbours; a set `D` dominates the
//! graph when every vertex outside `D` has an in-neighbour in `D`.

mod exact;
mod lp;
mod reduction;

pub use exact::{exact_domset, DomSetResult, GapPoint, SolverLimits};
pub use lp::export_ilp;
pub use reduction::{
    graph_to_metric, knn_hardness_instance, InstanceDoc, MetricInstance, UndirectedGraph,
    KNN_GADGET_RADIUS, KNN_GADGET_SPOKE,
};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Brute force refuses graphs larger than this.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Directed graph without self-loops; adjacency lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl DirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            out[u].push(v);
        }
        for adj in &mut out {
            adj.sort_unstable();
            adj.dedup();
        }
        Ok(Self::from_sorted_out(out))
    }

    /// `out` must already be sorted, deduplicated and loop-free.
    pub(crate) fn from_sorted_out(out: Vec<Vec<usize>>) -> Self {
        let mut inn = vec![Vec::new(); out.len()];
        for (u, adj) in out.iter().enumerate() {
            for &v in adj {
                inn[v].push(u);
            }
        }
        Self { out, inn }
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn out(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn inn(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().map(move |&v| (u, v)))
    }

    /// `N+[v]`, ascending.
    pub fn closed_out(&self, v: usize) -> Vec<usize> {
        let mut s = self.out[v].clone();
        let pos = s.partition_point(|&x| x < v);
        s.insert(pos, v);
        s
    }

    pub(crate) fn closed_out_sets(&self) -> Vec<FixedBitSet> {
        closed_sets(&self.out)
    }

    pub(crate) fn closed_in_sets(&self) -> Vec<FixedBitSet> {
        closed_sets(&self.inn)
    }
}

fn closed_sets(adj: &[Vec<usize>]) -> Vec<FixedBitSet> {
    let n = adj.len();
    adj.iter()
        .enumerate()
        .map(|(v, a)| {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(v);
            for &u in a {
                s.insert(u);
            }
            s
        })
        .collect()
}

/// JSON form shared by elimination graphs and plain (directed or undirected)
/// graphs: `{n, r, use_upper, edges: [[u, v], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_upper: Option<bool>,
    pub edges: Vec<[usize; 2]>,
}

impl GraphDoc {
    pub fn from_graph(g: &DirectedGraph) -> Self {
        Self {
            n: g.n(),
            r: None,
            use_upper: None,
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn to_directed(&self) -> Result<DirectedGraph> {
        DirectedGraph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))
    }

    pub fn to_undirected(&self) -> Result<UndirectedGraph> {
        UndirectedGraph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))
    }
}

/// Every vertex outside `set` has an in-neighbour in `set`.
pub fn verify_domination(g: &DirectedGraph, set: &[usize]) -> bool {
    let mut covered = vec![false; g.n()];
    for &d in set {
        if d >= g.n() {
            return false;
        }
        covered[d] = true;
        for &v in g.out(d) {
            covered[v] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

/// Output of [`greedy_domset`]: selection order and, per step, how many
/// still-undominated vertices the pick covered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreedyRun {
    pub order: Vec<usize>,
    pub covered: Vec<usize>,
}

/// Greedy-Dom-Set: repeatedly pick the undominated vertex whose closed
/// out-neighbourhood covers the most undominated vertices (lowest index on
/// ties) until every vertex is dominated.
pub fn greedy_domset(g: &DirectedGraph) -> GreedyRun {
    let sets = g.closed_out_sets();
    let mut left = FixedBitSet::with_capacity(g.n());
    left.insert_range(..);
    let mut run = GreedyRun {
        order: Vec::new(),
        covered: Vec::new(),
    };
    while !left.is_clear() {
        let mut best = (0, usize::MAX);
        for p in left.ones() {
            let c = sets[p].intersection_count(&left);
            if c > best.0 {
                best = (c, p);
            }
        }
        let (c, p) = best;
        left.difference_with(&sets[p]);
        run.order.push(p);
        run.covered.push(c);
    }
    run
}

/// Minimum dominating set by enumeration in order of increasing size; ties go
/// to the lexicographically smallest set.
pub fn brute_force_domset(g: &DirectedGraph) -> Result<DomSetResult> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let full: u32 = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let masks: Vec<u32> = (0..n)
        .map(|v| g.closed_out(v).into_iter().fold(0, |m, x| m | 1 << x))
        .collect();
    for size in 0..=n {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let cover = comb.iter().fold(0u32, |m, &v| m | masks[v]);
            if cover == full {
                return Ok(DomSetResult::optimal(comb));
            }
            if !next_combination(&mut comb, n) {
                break;
            }
        }
    }
    unreachable!("the full vertex set always dominates")
}

/// Advances `comb` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in (0..k).rev() {
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub edges: usize,
    /// Maximum closed out-degree `Δ(G)`.
    pub max_degree: usize,
    /// Vertices with no in-neighbours; they belong to every dominating set.
    pub in_isolated: usize,
}

pub fn graph_stats(g: &DirectedGraph) -> GraphStats {
    GraphStats {
        n: g.n(),
        edges: g.edge_count(),
        max_degree: (0..g.n()).map(|v| g.out(v).len() + 1).max().unwrap_or(0),
        in_isolated: (0..g.n()).filter(|&v| g.inn(v).is_empty()).count(),
    }
}
