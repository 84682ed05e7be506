//! Criterion benchmarks for the permdiff kernels; see `benches/`.
