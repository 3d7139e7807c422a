//! Seeded Monte-Carlo experiments: the closed tracking/planning loop, result
//! files and summaries.

mod config;
mod output;
mod run;

pub use config::{AlgorithmSpec, ExperimentConfig};
pub use output::{
    algorithm_order, emit_plot_data, ground_truth_rows, plot_tables, read_config, read_records, summarise, summarise_timing,
    write_results, DecompositionRow, GroundTruthRow, RmsByStepRow, SummaryRow, TargetCountRow, TimingRow, TimingSummaryRow,
    CONFIG_FILE, DEBUG_FILE, DECOMPOSITION_FILE, GROUND_TRUTH_FILE, RECORDS_FILE, RMS_BY_STEP_FILE, SUMMARY_FILE, TARGET_COUNT_FILE,
    TIMING_FILE, TIMING_SUMMARY_FILE, TRAJECTORIES_FILE,
};
pub use run::{
    ground_truth, run_experiment, run_single, ExperimentResult, PlanMode, PlannerDebugLine, RunOutput, RunRecord,
    TrajectoryRow,
};

#[cfg(test)]
mod tests;
