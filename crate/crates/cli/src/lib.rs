//! Command-line front end: Matrix Market input, generators, analysis
//! commands and JSON reports.

pub mod app;
pub mod input;
pub mod mmio;
pub mod report;

pub use app::{run, Cli, EXIT_CERTIFIED, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_NEGATIVE};
