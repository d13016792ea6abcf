//! Criterion benchmarks for `facet-core` live under `benches/`.
