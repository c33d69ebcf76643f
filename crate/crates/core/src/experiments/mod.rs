//! Scenario files, sweeps over the forwarding knobs, metric rows and CSV
//! output.

mod ann;
mod config;
mod metrics;
mod runner;

pub use ann::{ann_bench, AnnBenchConfig, AnnBenchReport};
pub use config::{ConfigError, ConsumerConfig, ScenarioConfig, WaitTime};
pub use metrics::{emit_csv, to_csv_string, CsvRow, MetricsRow, RowKey};
pub use runner::{
    accuracy_sweep, collect_rows, memory_estimate, run_points, run_scenario, sweep_fib_size, sweep_matches,
    sweep_threshold, sweep_wait, AccuracyRow, ExperimentError, Inputs, ScenarioResult, SeedRun, TABLE_ENTRY_BYTES,
};
