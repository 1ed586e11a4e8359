//! Criterion benchmarks for the hot kernels live in `benches/`.
//! Run with `cargo bench -p mallows-bench`.
