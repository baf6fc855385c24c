//! Criterion benchmarks for the mechanics kernels; see `benches/`.
