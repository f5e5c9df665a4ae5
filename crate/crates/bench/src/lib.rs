//! Criterion benchmarks for rigidity-core live in `benches/`.
