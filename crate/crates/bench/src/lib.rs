//! Criterion benchmarks for the spdc-core numerical kernels. See `benches/`.
