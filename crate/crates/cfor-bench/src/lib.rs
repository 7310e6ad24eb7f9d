//! Criterion benchmarks for the CFOR operators live in `benches/`.
