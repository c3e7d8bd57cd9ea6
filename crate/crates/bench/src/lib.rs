//! Criterion benchmarks for the `lpsens` estimators; see `benches/estimators.rs`.
