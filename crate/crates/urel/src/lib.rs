//! Benchmark harness for the ultra-relativistic Euler solvers: initial
//! conditions, run orchestration, comparison metrics and CSV output.

pub mod bench;
pub mod config;
pub mod error;
pub mod io;

pub use error::{BenchError, Result};
