//! Seeded anomaly injection over the bundled datasets, trial execution and
//! scoring.

mod datasets;
mod inject;
mod metrics;
mod render;
mod score;
mod trials;

pub use datasets::{
    bundled_datasets, dataset, dataset_sql, synthetic_table, Complexity, Dataset, SYNTHETIC_TABLE_NAME,
};
pub use inject::{inject_anomalies, AnomalyRecord, GroundTruth, InjectError};
pub use metrics::{aggregate, mean_and_std, MetricsReport};
pub use render::{histogram_cell, mean_std_cell, render_report, render_reports, ReportFormat};
pub use score::{score_trial, site_tables, ScoreError, TrialResult};
pub use trials::{run_trials, BenchError, BenchOutcome, TrialPlan, TrialRun, DEFAULT_ANOMALY_COUNT, DEFAULT_TRIALS};
