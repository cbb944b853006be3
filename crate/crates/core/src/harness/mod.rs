//! Seeded multi-trial experiments comparing BP, block-graph BP and exact
//! inference, plus result files and summaries.

mod experiment;
mod metric;
mod results;

pub use experiment::{run_experiment, trial_seed, Algorithm, ExperimentConfig, GraphSpec, TrialRecord};
pub use metric::mean_abs_error;
pub use results::{
    emit_results, per_m_curve, read_csv, read_json, summarize, write_csv, write_per_m_csv, OutputFormat, PerMPoint,
    SummaryRow,
};
