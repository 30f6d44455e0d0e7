//! Criterion benchmarks for `blockmass`; see `benches/kernels.rs`.
