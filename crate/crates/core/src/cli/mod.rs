//! Batch front-end behind the `blockkrylov` binary: configuration layering
//! and the `solve`, `verify`, `experiment` and `generate` runners.

mod config;
mod run;

pub use config::{Command, ConfigLayer, RunConfig, SEED_ENV};
pub use run::{run, run_experiment, run_generate, run_solve, run_verify, RunOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_BOUND_FAILED: i32 = 3;
