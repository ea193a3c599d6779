//! Criterion benchmarks for the hot numerical kernels live in `benches/`.
//! This crate intentionally exports nothing.
