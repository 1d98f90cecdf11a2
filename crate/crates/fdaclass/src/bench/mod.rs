//! Benchmark harness: leave-one-out tuning, the Monte Carlo comparison,
//! dataset CSV ingestion, and summary reporting.

pub mod csvio;
pub mod mc;
pub mod tune;

pub use csvio::{load_csv, save_csv, CsvDataset};
pub use mc::{
    format_rates_csv, format_summary_csv, format_summary_table, monte_carlo, run_replication,
    BenchOutput, ModelId, RunConfig, SummaryStats,
};
pub use tune::{loo_cv_select, Selected, TuningGrids};
