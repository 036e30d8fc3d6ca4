//! Elimination graphs: which single pivots resolve which objects for a query.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domset::{DirectedGraph, GraphDoc};
use crate::error::{Error, Result};
use crate::metric::{DistanceMatrix, QueryDistances};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    Range(f64),
    Knn(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub mode: QueryMode,
    pub use_upper: bool,
}

impl QuerySpec {
    /// Range query; upper-bound inclusion is on by default.
    pub fn range(r: f64) -> Self {
        Self {
            mode: QueryMode::Range(r),
            use_upper: true,
        }
    }

    /// kNN mapped to a range query at the kNN radius, lower bounds only.
    pub fn knn_optimum(k: usize) -> Self {
        Self {
            mode: QueryMode::Knn(k),
            use_upper: false,
        }
    }

    pub fn with_upper(mut self, use_upper: bool) -> Self {
        self.use_upper = use_upper;
        self
    }
}

/// Single-pivot elimination test on raw distances.
///
/// Exclusion is strict (`|δ(q,p) - δ(p,x)| > r`), inclusion is not
/// (`δ(q,p) + δ(p,x) <= r`); `tol` widens both towards elimination.
#[inline]
pub fn eliminates_by(dqp: f64, dpx: f64, r: f64, use_upper: bool, tol: f64) -> bool {
    excludes(dqp, dpx, r, tol) || (use_upper && includes(dqp, dpx, r, tol))
}

#[inline]
pub(crate) fn excludes(dqp: f64, dpx: f64, r: f64, tol: f64) -> bool {
    (dqp - dpx).abs() > r + tol
}

#[inline]
pub(crate) fn includes(dqp: f64, dpx: f64, r: f64, tol: f64) -> bool {
    dqp + dpx <= r + tol
}

/// Whether computing `δ(q,p)` alone resolves `x`.
pub fn eliminates(
    p: usize,
    x: usize,
    qd: &QueryDistances,
    dm: &DistanceMatrix,
    r: f64,
    use_upper: bool,
) -> bool {
    eliminates_by(qd.all()[p], dm.get(p, x), r, use_upper, dm.tolerance())
}

/// Directed graph with an edge `p -> x` whenever pivot `p` resolves `x`.
#[derive(Clone, Debug)]
pub struct EliminationGraph {
    pub graph: DirectedGraph,
    pub r: f64,
    pub use_upper: bool,
    /// `Some(false)` when the graph came from a kNN query that has ties at
    /// the k-th position.
    pub knn_unique: Option<bool>,
}

impl EliminationGraph {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn to_doc(&self) -> GraphDoc {
        let mut doc = GraphDoc::from_graph(&self.graph);
        doc.r = Some(self.r);
        doc.use_upper = Some(self.use_upper);
        doc
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<Self> {
        Ok(Self {
            graph: doc.to_directed()?,
            r: doc
                .r
                .ok_or_else(|| Error::InvalidGraph("missing radius `r`".into()))?,
            use_upper: doc.use_upper.unwrap_or(true),
            knn_unique: None,
        })
    }
}

/// Builds the elimination graph for a fully known query. `O(n^2)`.
pub fn build_elimination_graph(
    dm: &DistanceMatrix,
    qd: &QueryDistances,
    spec: QuerySpec,
) -> Result<EliminationGraph> {
    let n = dm.n();
    if qd.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: qd.len(),
        });
    }
    let (r, knn_unique) = match spec.mode {
        QueryMode::Range(r) => (r, None),
        QueryMode::Knn(k) => {
            let (r, unique) = knn_radius(qd, k)?;
            (r, Some(unique))
        }
    };
    let tol = dm.tolerance();
    let dq = qd.all();
    let out: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|p| {
            let row = dm.row(p);
            (0..n)
                .filter(|&x| x != p && eliminates_by(dq[p], row[x], r, spec.use_upper, tol))
                .collect()
        })
        .collect();
    Ok(EliminationGraph {
        graph: DirectedGraph::from_sorted_out(out),
        r,
        use_upper: spec.use_upper,
        knn_unique,
    })
}

/// The `k`-th smallest query distance, and whether the k-NN set it defines
/// is unique (no tie between positions `k` and `k+1`).
pub fn knn_radius(qd: &QueryDistances, k: usize) -> Result<(f64, bool)> {
    let n = qd.len();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut d = qd.all().to_vec();
    d.sort_by(f64::total_cmp);
    let r = d[k - 1];
    let unique = k == n || d[k] != r;
    Ok((r, unique))
}

/// Ground truth `{x : δ(q,x) <= r + tol}`, ascending.
pub fn linear_scan(qd: &QueryDistances, r: f64, tol: f64) -> Vec<usize> {
    qd.all()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d <= r + tol)
        .map(|(i, _)| i)
        .collect()
}
