//! Criterion benchmarks for speclab-core; see `benches/`.
