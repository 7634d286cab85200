//! Snapshot ingestion, model files, result tables, images and the
//! train/predict pipeline.

mod model_file;
mod pgm;
mod pipeline;
mod snapshots;
mod tables;

pub use model_file::{load_model, read_model, save_model, write_model};
pub use pgm::{write_pgm, FieldGrid};
pub use pipeline::{run_pipeline, run_pipeline_on, IndexRange, PipelineReport, RunConfig};
pub use snapshots::{
    load_snapshots, parse_csv, parse_raw_f64, save_snapshots, to_csv, to_raw_f64, SnapshotFormat,
};
pub use tables::{eigenvalue_table, error_table, mode_table, relative_error, states_table};

/// Fixed float formatting for all text outputs: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
