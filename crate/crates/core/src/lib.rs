//! Exact distance-computation optima for metric search.
//!
//! For a fixed dataset and query, the smallest number of query distances any
//! pivoting search must compute equals the domination number of the query's
//! elimination graph. This crate builds those graphs, solves them exactly,
//! and runs the AESA family of online pivot-selection heuristics against the
//! optimum.

pub mod data;
pub mod domset;
pub mod elimination;
pub mod error;
pub mod experiment;
pub mod metric;
pub mod plot;
pub mod rng;
pub mod sim;

pub use domset::{
    brute_force_domset, exact_domset, export_ilp, graph_stats, graph_to_metric, greedy_domset,
    knn_hardness_instance, verify_domination, DirectedGraph, DomSetResult, GraphDoc, SolverLimits,
    UndirectedGraph,
};
pub use elimination::{
    build_elimination_graph, eliminates, knn_radius, linear_scan, EliminationGraph, QueryMode,
    QuerySpec,
};
pub use error::{Error, Result};
pub use metric::{
    adversarial_metrics, build_distance_matrix, compute_distance, pivot_bounds, verify_metric,
    verify_pseudometric, Bounds, Dataset, DistanceMatrix, MetricKind, MetricReport, Object,
    QueryDistances,
};

pub use sim::{
    run_knn_search, run_knn_search_with, run_range_search, run_range_search_with, SimOptions,
    SimTrace, Step, Strategy,
};
