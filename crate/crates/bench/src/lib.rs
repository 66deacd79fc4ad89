//! Benchmarks for the braidfan library live in `benches/`.
