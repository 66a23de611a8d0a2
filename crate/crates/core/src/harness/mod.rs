//! Instance generators, experiment grids and their CSV output.

mod experiment;
mod generators;
mod scaling;
mod stats;

pub use experiment::{
    run_bench, run_experiment, run_trial, summarize, summary_path, write_records_csv,
    write_summary_csv, CellSummary, ExperimentConfig, ExperimentOutput, GridCell, TrialRecord,
    GEN_STREAM, RECORD_HEADER, SUMMARY_HEADER,
};
pub use generators::{
    class_mode, gen_far_instance, gen_instance, gen_k_parity, Certificate, DistSpec, Family,
    FunctionSpec, Instance, Label, CERTIFY_ATTEMPTS, MAX_TABLE_FAMILY_DIM,
};
pub use scaling::{query_scaling_report, ScalingReport, ScalingRow};
pub use stats::{wilson_interval, Z95};
