//! Declarative experiments: config parsing, coupled ensemble runs and
//! CSV/summary reports with pass/fail verdicts.

mod config;
mod presets;
mod report;
mod runners;

pub use config::{
    parse_config, Dataset, DistanceOptions, EntropyOptions, ExperimentConfig, ExperimentKind,
    ModulusOptions, Sweep, SweepTarget, VerdictOptions, DEFAULT_CUT_RATIO, DEFAULT_TOL_CONST,
};
pub use presets::{catalogue, experiment_preset, InitialData, EXPERIMENT_PRESETS};
pub use report::{emit_report, ExperimentReport, ReportRow, Verdict};
pub use runners::{
    expansion_shock_trajectory, run_bv_monotone, run_continuous_dependence, run_entropy_check,
    run_error_rate, run_experiment, run_fractional_bv, RunOptions,
};
