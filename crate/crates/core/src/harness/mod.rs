//! Monte Carlo harness.
//!
//! An [`ExperimentSpec`] names a protocol, the two parties' strategies, a
//! trial count and a master seed. Trial `t` draws all randomness from
//! streams derived from `(masterSeed, t)`, so reports are reproducible and
//! independent of thread count. Each estimate is paired with a closed-form
//! prediction where one exists.

pub mod report;
pub mod run;
pub mod spec;
pub mod stats;
pub mod sweep;

pub use report::{to_csv_string, write_csv, write_csv_rows, CsvRow, ExperimentReport, Prediction, REPORT_SCHEMA};
pub use run::{
    default_metrics, estimate_adam_cheat, prediction_for, run_counts, run_experiment, run_experiment_with,
    stream_collisions, CheatRow, Counts, RunOptions,
};
pub use spec::{ExperimentSpec, Metric, DEFAULT_TRIALS, MAX_TRIALS};
pub use stats::{clopper_pearson, z_score, Estimate, CONFIDENCE};
pub use sweep::{run_sweep, Axis, SweepRow, SweepSpec, CHECKPOINT_SCHEMA};
