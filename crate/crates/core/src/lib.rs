//! Slice-aware calendaring of time-slotted radio resources shared by
//! tenants.
//!
//! * [`model`]: instances, schedules, the constraint validator.
//! * [`exact`]: branch-and-bound optimum and an exhaustive cross-check.
//! * [`heuristics`]: the dedicated (DRA) and sharing (SRA) greedy schedulers.
//! * [`workload`]: seeded instance generator.
//! * [`experiments`]: multi-seed sweeps and CSV reports.
//! * [`cli`]: the `slice-cal` command line.

pub mod cli;
pub mod exact;
pub mod experiments;
pub mod heuristics;
pub mod model;
pub mod workload;

pub use exact::{enumerate_all, solve_exact, ExactResult, SolveMode};
pub use heuristics::{dra, sra};
pub use model::{validate, welfare, Instance, Request, Schedule, SliceType, Tenant};
pub use workload::{generate, GenConfig};
