//! Deterministic construction of every prompt variant used by the
//! generation pipeline (plan prompts, plan-conditioned layout prompts,
//! one-step prompts with and without chain-of-thought), plus the plan
//! parser, the exemplar store, and training-constraint sampling.

mod assets;
mod bundle;
mod builders;
mod plan;
mod sampler;
mod store;

pub use assets::{PromptAssets, PROMPT_VERSIONS};
pub use builders::{build_layout_prompt, build_one_step_prompt, build_plan_prompt};
pub use bundle::{PromptBundle, PromptMessage, PromptPart, Role};
pub use plan::{parse_plan, Directive, PlacementPlan};
pub use sampler::sample_constraint;
pub use store::{Exemplar, ExemplarStore};

use thiserror::Error;

pub use adlayout_core::layout::ElementConstraint;

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("exemplar {0} has no placement plan directives")]
    ExemplarMissingPlan(String),
    #[error("plan does not cover the constraint; missing: {0}")]
    PlanConstraintMismatch(String),
    #[error("at most 16 exemplars are supported (got {0})")]
    TooManyExemplars(usize),
    #[error("store has {have} exemplars but {want} shots were requested")]
    NotEnoughExemplars { have: usize, want: usize },
    #[error("unknown prompt version {0:?}; known: v1")]
    UnknownVersion(String),
    #[error("exemplar {id} is invalid: {reason}")]
    InvalidExemplar { id: String, reason: String },
    #[error("cannot read exemplar store: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed exemplar manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("plan is missing directives for: {0}")]
    MissingDirective(String),
    #[error("plan references {category} {index}, which is not in the constraint")]
    UnknownElementRef { category: adlayout_core::layout::Category, index: u32 },
    #[error("plan has more than one directive for: {0}")]
    DuplicateDirective(String),
    #[error("annotation set is empty")]
    EmptyAnnotationSet,
    #[error("constraint is invalid: {0}")]
    Constraint(String),
}
