//! Criterion benchmarks for the alk-core kernels live in `benches/`.
