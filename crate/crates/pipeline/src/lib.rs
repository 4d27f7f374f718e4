//! Orchestration of generation runs: the seven ablation conditions,
//! two-step and one-step generation with parse-failure repair, dataset
//! import, write-once records, and Table-shaped aggregation.

mod conditions;
mod dataset;
mod generate;
mod record;
mod run;
mod scoring;
#[cfg(feature = "testsupport")]
pub mod synth;

pub use conditions::Condition;
pub use dataset::{
    import_dataset, DatasetKind, DatasetManifest, ImportProblem, ImportReport, ManifestEntry,
};
pub use generate::{generate_one_step, generate_two_step, repair_layout, GenContext, GenOutcome};
pub use record::{record_file_name, GenerationRecord, ModelMeta, RecordMeta};
pub use run::{
    aggregate_run, run_experiment, ConstraintSource, RunConfig, RunSummary, AGGREGATE_HEADER,
    VIOLATIONS_HEADER,
};
pub use scoring::{sample_saliency, score_scaled};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("transport failure: {0}")]
    Client(#[from] adlayout_client::ClientError),
    #[error(transparent)]
    Prompt(#[from] adlayout_prompt::PromptError),
    #[error("dataset problem: {0}")]
    Dataset(String),
    #[error("configuration problem: {0}")]
    Config(String),
    #[error("record {path} does not match its key (expected {expected})")]
    RecordMismatch { path: String, expected: String },
    #[error(transparent)]
    Metrics(#[from] adlayout_core::metrics::MetricsError),
    #[error("saliency failure: {0}")]
    Saliency(#[from] adlayout_core::saliency::SaliencyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("cannot serialize run config: {0}")]
    Toml(#[from] toml::ser::Error),
}

/// Failure text recorded on a sample when step 1 output cannot be parsed.
pub const PLAN_PARSE_FAILED: &str = "PlanParseFailed";
/// Failure text recorded on a sample when no layout could be recovered.
pub const LAYOUT_PARSE_FAILED: &str = "LayoutParseFailed";
