//! Generators, exhaustive small-case oracles, property suites and verdicts.

pub mod gen;
pub mod oracle;
pub mod suites;

pub use gen::{all_small_spaces, default_grid, gen_space, gen_weights, repaired_space, GenConfig};
pub use suites::{replay, run_suite, CheckRecord, ReplayOutcome, SuiteReport, SUITES};
