//! Criterion benchmarks for the `hypermatch` crate; see `benches/`.
