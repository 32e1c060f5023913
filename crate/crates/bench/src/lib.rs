//! Criterion benchmarks for the parsers; see `benches/parsers.rs`.
