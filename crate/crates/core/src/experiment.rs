//! Workload configuration and the k-sweep experiment harness.
//!
//! A run fixes a dataset, a set of withheld queries and a grid of `k`. Each
//! `(query, k)` cell searches radius `r = δ(q, k-th neighbour)` with every
//! requested method; the optimum comes from the exact dominating-set solver on
//! the cell's elimination graph. Cells run in parallel and are collected in
//! grid order, and every random choice derives from the master seed, so the
//! emitted tables depend only on the configuration.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{
    gen_uniform_vectors, load_strings, load_vectors, withhold_queries, QuerySelection,
};
use crate::domset::{exact_domset, graph_to_metric, GraphDoc, SolverLimits};
use crate::elimination::{build_elimination_graph, knn_radius, QuerySpec};
use crate::error::{Error, Result};
use crate::metric::{
    build_distance_matrix, Dataset, DistanceMatrix, MetricKind, Object, QueryDistances,
};
use crate::rng::derive_seed;
use crate::sim::{run_range_search, Strategy};

/// Seed tags for sub-streams derived from the master seed.
const TAG_DATA: u64 = 1;
const TAG_QUERIES: u64 = 2;
const TAG_RANDOM: u64 = 3;

/// Default `k` grid.
pub const DEFAULT_K: [usize; 6] = [1, 3, 5, 7, 9, 11];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceConfig {
    Uniform {
        n: usize,
        d: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    VectorFile {
        path: PathBuf,
    },
    StringFile {
        path: PathBuf,
    },
    /// Undirected graph JSON, turned into its 0/1/2 explicit metric with the
    /// extra query point and radius 1/2.
    GraphFile {
        path: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricConfig {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
    Minkowski(f64),
    Levenshtein,
}

impl MetricConfig {
    pub fn to_kind(self) -> MetricKind {
        match self {
            MetricConfig::Euclidean => MetricKind::euclidean(),
            MetricConfig::Manhattan => MetricKind::manhattan(),
            MetricConfig::Chebyshev => MetricKind::Minkowski(f64::INFINITY),
            MetricConfig::Minkowski(p) => MetricKind::Minkowski(p),
            MetricConfig::Levenshtein => MetricKind::Levenshtein,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QueryConfig {
    Sample {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Indices {
        indices: Vec<usize>,
    },
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig::Sample {
            count: 10,
            seed: None,
        }
    }
}

/// JSON workload description. Missing seeds derive from the master seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkloadConfig {
    pub source: SourceConfig,
    #[serde(default)]
    pub metric: MetricConfig,
    #[serde(default)]
    pub queries: QueryConfig,
}

impl WorkloadConfig {
    pub fn uniform(n: usize, d: usize, queries: usize) -> Self {
        Self {
            source: SourceConfig::Uniform { n, d, seed: None },
            metric: MetricConfig::Euclidean,
            queries: QueryConfig::Sample {
                count: queries,
                seed: None,
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A loaded workload: the searched dataset, its matrix and the queries.
#[derive(Clone, Debug)]
pub struct Workload {
    pub dataset: Dataset,
    pub matrix: Arc<DistanceMatrix>,
    pub queries: Vec<Object>,
    /// Index of each query in the source before withholding.
    pub query_ids: Vec<usize>,
    /// Set for graph sources, whose single query has a fixed radius.
    pub fixed_radius: Option<f64>,
}

impl Workload {
    pub fn load(cfg: &WorkloadConfig, master_seed: u64) -> Result<Self> {
        let metric = cfg.metric.to_kind();
        let source = match &cfg.source {
            SourceConfig::Uniform { n, d, seed } => {
                let seed = seed.unwrap_or_else(|| derive_seed(master_seed, &[TAG_DATA]));
                gen_uniform_vectors(*n, *d, seed, metric)?
            }
            SourceConfig::VectorFile { path } => load_vectors(path, metric)?,
            SourceConfig::StringFile { path } => load_strings(path)?,
            SourceConfig::GraphFile { path } => {
                let doc: GraphDoc = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                let inst = graph_to_metric(&doc.to_undirected()?)?;
                let matrix = Arc::new(build_distance_matrix(&inst.dataset)?);
                return Ok(Self {
                    queries: vec![inst.query_object()],
                    query_ids: vec![inst.query],
                    dataset: inst.dataset,
                    matrix,
                    fixed_radius: Some(inst.r),
                });
            }
        };
        let sel = match &cfg.queries {
            QueryConfig::Sample { count, seed } => QuerySelection::Sample {
                count: *count,
                seed: seed.unwrap_or_else(|| derive_seed(master_seed, &[TAG_QUERIES])),
            },
            QueryConfig::Indices { indices } => QuerySelection::Indices(indices.clone()),
        };
        let w = withhold_queries(source, &sel)?;
        let matrix = Arc::new(build_distance_matrix(&w.dataset)?);
        Ok(Self {
            dataset: w.dataset,
            matrix,
            queries: w.queries,
            query_ids: w.query_indices,
            fixed_radius: None,
        })
    }

    pub fn query_distances(&self, query: usize) -> Result<QueryDistances> {
        let q = self.queries.get(query).ok_or(Error::IndexOutOfRange {
            index: query,
            len: self.queries.len(),
        })?;
        QueryDistances::from_query(&self.dataset, q)
    }

    /// Radius of the cell: fixed for graph sources, else the k-th neighbour
    /// distance.
    pub fn radius(&self, qd: &QueryDistances, k: usize) -> Result<f64> {
        match self.fixed_radius {
            Some(r) => Ok(r),
            None => Ok(knn_radius(qd, k)?.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Optimum,
    Heuristic(Strategy),
}

impl Method {
    pub fn token(&self) -> &'static str {
        match self {
            Method::Optimum => "optimum",
            Method::Heuristic(s) => s.token(),
        }
    }

    /// All methods in the default column order.
    pub fn all() -> Vec<Method> {
        vec![
            Method::Optimum,
            Method::Heuristic(Strategy::Oracle),
            Method::Heuristic(Strategy::Aesa),
            Method::Heuristic(Strategy::Iaesa2),
            Method::Heuristic(Strategy::Gaesa),
            Method::Heuristic(Strategy::Random { seed: 0 }),
        ]
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("optimum") {
            Ok(Method::Optimum)
        } else {
            s.parse().map(Method::Heuristic)
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub workload: WorkloadConfig,
    pub k_values: Vec<usize>,
    pub methods: Vec<Method>,
    pub use_upper: bool,
    pub limits: SolverLimits,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(workload: WorkloadConfig) -> Self {
        Self {
            workload,
            k_values: DEFAULT_K.to_vec(),
            methods: Method::all(),
            use_upper: true,
            limits: SolverLimits::default(),
            seed: 0,
        }
    }
}

/// One method on one `(query, k)` cell. Heuristics have `lower == upper`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RawRow {
    pub query: usize,
    pub k: usize,
    pub method: Method,
    pub radius: f64,
    pub lower: usize,
    pub upper: usize,
    pub proven: bool,
}

/// Per-`(k, method)` aggregate over queries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub k: usize,
    pub method: Method,
    pub queries: usize,
    pub mean_lower: f64,
    pub mean_upper: f64,
    /// Population standard deviation of the upper values.
    pub stddev: f64,
    pub all_proven: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub cells: Vec<CellSummary>,
    pub raw: Vec<RawRow>,
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let workload = Workload::load(&spec.workload, spec.seed)?;
    run_on_workload(spec, &workload)
}

pub fn run_on_workload(spec: &ExperimentSpec, w: &Workload) -> Result<ExperimentReport> {
    if spec.k_values.is_empty() {
        return Err(Error::InvalidSpec("no k values".into()));
    }
    if spec.methods.is_empty() {
        return Err(Error::InvalidSpec("no methods".into()));
    }
    let n = w.dataset.len();
    if let Some(&k) = spec.k_values.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::KOutOfRange { k, n });
    }
    if w.queries.is_empty() {
        return Err(Error::InvalidSpec("no queries".into()));
    }
    let cells: Vec<(usize, usize)> = (0..w.queries.len())
        .flat_map(|q| spec.k_values.iter().map(move |&k| (q, k)))
        .collect();
    let per_cell: Vec<Vec<RawRow>> = cells
        .par_iter()
        .map(|&(q, k)| run_cell(spec, w, q, k))
        .collect::<Result<_>>()?;
    let raw: Vec<RawRow> = per_cell.into_iter().flatten().collect();

    let mut summaries = Vec::new();
    for &k in &spec.k_values {
        for &m in &spec.methods {
            let rows: Vec<&RawRow> = raw.iter().filter(|r| r.k == k && r.method == m).collect();
            summaries.push(summarise(k, m, &rows));
        }
    }
    Ok(ExperimentReport {
        cells: summaries,
        raw,
    })
}

fn run_cell(spec: &ExperimentSpec, w: &Workload, q: usize, k: usize) -> Result<Vec<RawRow>> {
    let qd = w.query_distances(q)?;
    let r = w.radius(&qd, k)?;
    log::debug!("query {} k {k} radius {r}", w.query_ids[q]);
    let mut rows = Vec::with_capacity(spec.methods.len());
    for &m in &spec.methods {
        let (lower, upper, proven) = match m {
            Method::Optimum => {
                let g = build_elimination_graph(
                    &w.matrix,
                    &qd,
                    QuerySpec::range(r).with_upper(spec.use_upper),
                )?;
                let res = exact_domset(&g.graph, spec.limits);
                (res.lower_bound, res.upper_bound, res.proven_optimal)
            }
            Method::Heuristic(s) => {
                let s = match s {
                    Strategy::Random { .. } => Strategy::Random {
                        seed: derive_seed(
                            spec.seed,
                            &[TAG_RANDOM, w.query_ids[q] as u64, k as u64],
                        ),
                    },
                    other => other,
                };
                let t = run_range_search(s, &w.matrix, &qd, r, spec.use_upper);
                (t.computations, t.computations, true)
            }
        };
        rows.push(RawRow {
            query: w.query_ids[q],
            k,
            method: m,
            radius: r,
            lower,
            upper,
            proven,
        });
    }
    Ok(rows)
}

fn summarise(k: usize, method: Method, rows: &[&RawRow]) -> CellSummary {
    let m = rows.len() as f64;
    let mean_lower = rows.iter().map(|r| r.lower as f64).sum::<f64>() / m;
    let mean_upper = rows.iter().map(|r| r.upper as f64).sum::<f64>() / m;
    let var = rows
        .iter()
        .map(|r| (r.upper as f64 - mean_upper).powi(2))
        .sum::<f64>()
        / m;
    CellSummary {
        k,
        method,
        queries: rows.len(),
        mean_lower,
        mean_upper,
        stddev: var.sqrt(),
        all_proven: rows.iter().all(|r| r.proven),
    }
}

/// `k method mean_computations stddev queries proven`. Optimum cells with an
/// unproven query show `[mean_lower,mean_upper]`; heuristics show `-` under
/// `proven`.
pub fn write_results_tsv<W: Write>(cells: &[CellSummary], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
    out.write_record([
        "k",
        "method",
        "mean_computations",
        "stddev",
        "queries",
        "proven",
    ])?;
    for c in cells {
        let mean = if c.all_proven {
            format!("{:.3}", c.mean_upper)
        } else {
            format!("[{:.3},{:.3}]", c.mean_lower, c.mean_upper)
        };
        let proven = match c.method {
            Method::Optimum if c.all_proven => "yes",
            Method::Optimum => "no",
            Method::Heuristic(_) => "-",
        };
        out.write_record([
            c.k.to_string(),
            c.method.token().to_string(),
            mean,
            format!("{:.3}", c.stddev),
            c.queries.to_string(),
            proven.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `query k method radius lower upper proven`, one row per method and cell.
pub fn write_raw_tsv<W: Write>(rows: &[RawRow], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
    out.write_record(["query", "k", "method", "radius", "lower", "upper", "proven"])?;
    for r in rows {
        out.write_record([
            r.query.to_string(),
            r.k.to_string(),
            r.method.token().to_string(),
            format!("{:.9}", r.radius),
            r.lower.to_string(),
            r.upper.to_string(),
            r.proven.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
