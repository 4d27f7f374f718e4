//! Judge harness: a vision-language model scores rendered layouts on
//! three criteria, absolutely (1-10) or pairwise, and the results fold
//! into box-plot, scatter, and preference-table data.

mod assets;
mod calls;
mod parse;
mod stats;

pub use assets::{JudgeAssets, JUDGE_VERSIONS};
pub use calls::{judge_absolute, judge_pairwise, JudgeParams};
pub use parse::{parse_absolute, parse_pairwise};
pub use stats::{
    disagreement_rate, five_number, summarize_judgement, BoxStats, CriterionSummary, JudgeSummary,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("cannot parse judge response: {0}")]
    JudgeParseFailed(String),
    #[error(transparent)]
    Client(#[from] adlayout_client::ClientError),
    #[error("cannot aggregate empty judge data")]
    EmptyAggregate,
    #[error("paired score lists differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("unknown judge prompt version {0:?}; known: v1")]
    UnknownVersion(String),
}

/// The three judged criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Alignment,
    Overlap,
    WhiteSpace,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::Alignment, Criterion::Overlap, Criterion::WhiteSpace];

    pub fn key(&self) -> &'static str {
        match self {
            Criterion::Alignment => "alignment",
            Criterion::Overlap => "overlap",
            Criterion::WhiteSpace => "white_space",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Criterion::Alignment => "Alignment",
            Criterion::Overlap => "Overlap",
            Criterion::WhiteSpace => "White Space",
        }
    }
}

/// Absolute judgement: integer or half-point scores in [1, 10] with a
/// non-empty explanation per criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsoluteScore {
    pub alignment: f64,
    pub overlap: f64,
    pub white_space: f64,
    pub explanations: Explanations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanations {
    pub alignment: String,
    pub overlap: String,
    pub white_space: String,
}

impl AbsoluteScore {
    pub fn get(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Alignment => self.alignment,
            Criterion::Overlap => self.overlap,
            Criterion::WhiteSpace => self.white_space,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    A,
    B,
}

impl Winner {
    pub fn flipped(self) -> Winner {
        match self {
            Winner::A => Winner::B,
            Winner::B => Winner::A,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Winner::A => "A",
            Winner::B => "B",
        }
    }
}

/// Pairwise judgement, always expressed in the caller's frame: `A` refers
/// to the first image passed in, regardless of presentation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseVerdict {
    pub alignment: Winner,
    pub overlap: Winner,
    pub white_space: Winner,
    pub justification: String,
    /// True when the presentation order was swapped (position-bias probe).
    pub swapped_presentation: bool,
}

impl PairwiseVerdict {
    pub fn get(&self, criterion: Criterion) -> Winner {
        match criterion {
            Criterion::Alignment => self.alignment,
            Criterion::Overlap => self.overlap,
            Criterion::WhiteSpace => self.white_space,
        }
    }
}
