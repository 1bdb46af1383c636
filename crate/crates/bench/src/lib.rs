//! Criterion benchmarks for `crat-core`; see `benches/`.
