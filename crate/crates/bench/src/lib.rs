//! Criterion benchmarks for `mslab-core`; see `benches/`.
