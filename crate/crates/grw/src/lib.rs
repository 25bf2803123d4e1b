//! File formats, plan validation, the experiment harness and the
//! command-line front end on top of `grw-core`.

pub mod io;
pub mod plan;
pub mod run;
pub mod shipped;
pub mod suite;

pub use plan::{emit_plan, read_plan, validate_plan, PlanRecord, Verdict};
pub use suite::{run_suite, ExperimentConfig, Report};
