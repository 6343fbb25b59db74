//! Criterion benchmarks for the core crate live in `benches/`.
