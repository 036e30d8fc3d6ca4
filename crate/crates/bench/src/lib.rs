//! Criterion benchmarks for the optsearch solvers live in `benches/`.
