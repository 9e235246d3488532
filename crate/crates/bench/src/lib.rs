//! Criterion benchmarks for `zeroflow-core`; see `benches/flow.rs`.
