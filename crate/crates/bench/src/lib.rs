//! Benchmark harness: problem grids from a TOML file, cached reference
//! optima, solver traces as CSV and suboptimality plots as SVG.

// `!(a > b)` is written on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod instance;
pub mod plot;
pub mod range;
pub mod reference;
pub mod run;

pub use config::BenchSpec;
pub use error::{BenchError, Result};
pub use reference::{compute_reference, ReferenceOptimum};
pub use run::{run_bench, BenchReport, RunOptions};
