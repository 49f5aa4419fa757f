//! Criterion benchmarks for the hyperflow core live in `benches/`.
