//! From undirected dominating set back to metric search.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{DirectedGraph, GraphDoc};
use crate::error::{Error, Result};
use crate::metric::{Dataset, DistanceMatrix, MetricKind, Object};

/// Simple undirected graph; edges stored once as `(min, max)`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut es = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            es.push((a.min(b), a.max(b)));
        }
        es.sort_unstable();
        es.dedup();
        Ok(Self { n, edges: es })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Both orientations of every edge. Dominating sets of the result are
    /// exactly the undirected dominating sets.
    pub fn to_directed(&self) -> DirectedGraph {
        let arcs = self.edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]);
        DirectedGraph::new(self.n, arcs).expect("edges were validated")
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            n: self.n,
            r: None,
            use_upper: None,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

/// A search instance over an explicit metric: the dataset holds points
/// `0..n` of `matrix`, and the query is a further point of the same matrix.
#[derive(Clone, Debug)]
pub struct MetricInstance {
    pub dataset: Dataset,
    pub matrix: Arc<DistanceMatrix>,
    pub query: usize,
    pub r: f64,
    /// Set for kNN instances.
    pub k: Option<usize>,
}

/// JSON form of a [`MetricInstance`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub matrix: DistanceMatrix,
    pub query: usize,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl MetricInstance {
    fn from_matrix(matrix: DistanceMatrix, r: f64, k: Option<usize>) -> Result<Self> {
        let matrix = Arc::new(matrix);
        let query = matrix.n() - 1;
        let objects = (0..query).map(Object::Point).collect();
        let dataset = Dataset::new(objects, MetricKind::Explicit(matrix.clone()))?;
        Ok(Self {
            dataset,
            matrix,
            query,
            r,
            k,
        })
    }

    pub fn query_object(&self) -> Object {
        Object::Point(self.query)
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            matrix: (*self.matrix).clone(),
            query: self.query,
            r: self.r,
            k: self.k,
        }
    }

    /// Accepts any query index; the dataset is every other point in order.
    pub fn from_doc(doc: InstanceDoc) -> Result<Self> {
        let n = doc.matrix.n();
        if doc.query >= n {
            return Err(Error::IndexOutOfRange {
                index: doc.query,
                len: n,
            });
        }
        if n < 2 {
            return Err(Error::EmptyDataset);
        }
        let matrix = Arc::new(doc.matrix);
        let objects = (0..n)
            .filter(|&i| i != doc.query)
            .map(Object::Point)
            .collect();
        let dataset = Dataset::new(objects, MetricKind::Explicit(matrix.clone()))?;
        Ok(Self {
            dataset,
            matrix,
            query: doc.query,
            r: doc.r,
            k: doc.k,
        })
    }
}

/// Range-search instance whose elimination graph is `g`:
/// `δ = 0` on the diagonal, `1` on edges, `2` elsewhere (so `δ(q, x) = 2`),
/// searched with radius `1/2`.
pub fn graph_to_metric(g: &UndirectedGraph) -> Result<MetricInstance> {
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut rows = vec![vec![2.0; n + 1]; n + 1];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b) in g.edges() {
        rows[a][b] = 1.0;
        rows[b][a] = 1.0;
    }
    MetricInstance::from_matrix(DistanceMatrix::from_rows(rows)?, 0.5, None)
}

/// 1-NN query distance to the extra object `x̄`; also the 1-NN radius.
pub const KNN_GADGET_RADIUS: f64 = 0.75;
/// Distance from `x̄` to every vertex object.
pub const KNN_GADGET_SPOKE: f64 = 1.25;

/// 1-NN instance whose optimum (lower bounds only) is `γ(g) + 1`.
///
/// Adds `x̄` (index `n`) before the query (index `n + 1`). With
/// `δ(q, x̄) = 3/4` and `δ(x̄, y) = 5/4` the triangle `q, x̄, y` is tight, so
/// `x̄` eliminates no vertex object and no vertex eliminates `x̄`; it has to be
/// computed on its own, while the vertex objects keep the graph's
/// eliminations at radius `3/4 < 1`.
pub fn knn_hardness_instance(g: &UndirectedGraph) -> Result<MetricInstance> {
    let n = g.n();
    let base = graph_to_metric(g)?;
    let mut rows = vec![vec![0.0; n + 2]; n + 2];
    for i in 0..n {
        for j in 0..n {
            rows[i][j] = base.matrix.get(i, j);
        }
        rows[i][n] = KNN_GADGET_SPOKE;
        rows[n][i] = KNN_GADGET_SPOKE;
        rows[i][n + 1] = 2.0;
        rows[n + 1][i] = 2.0;
    }
    rows[n][n + 1] = KNN_GADGET_RADIUS;
    rows[n + 1][n] = KNN_GADGET_RADIUS;
    MetricInstance::from_matrix(DistanceMatrix::from_rows(rows)?, KNN_GADGET_RADIUS, Some(1))
}
