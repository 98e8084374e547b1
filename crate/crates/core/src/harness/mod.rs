//! Experiment configuration, multi-replica runs, persisted formats and the
//! comparison and diagnostic reports built on them.

pub mod conditions;
pub mod config;
pub mod json;
pub mod report;
pub mod run;
pub mod theory_file;

pub use conditions::{check_conditions, Diagnostics};
pub use config::{CheckpointSchedule, ExperimentConfig, ScheduleName, SCHEMA_VERSION};
pub use report::{compare_report, Report};
pub use run::{run_experiment, run_replica, Manifest, RunData};
pub use theory_file::{build_theory, Empirical, SelectedLaw, TheoryFile};
