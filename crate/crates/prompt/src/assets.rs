use super::PromptError;

/// One frozen set of prompt template strings. Versions are immutable once
/// shipped; condition comparability depends on the exact bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromptAssets {
    pub version: &'static str,
    pub plan_instruction: &'static str,
    pub plan_constraint: &'static str,
    pub layout_instruction: &'static str,
    /// Two lines: the task name and the placement rule.
    pub layout_task: &'static str,
    pub onestep_cot: &'static str,
    pub onestep_nocot: &'static str,
}

pub const V1: PromptAssets = PromptAssets {
    version: "v1",
    plan_instruction: include_str!("../assets/v1/plan_instruction.txt"),
    plan_constraint: include_str!("../assets/v1/plan_constraint.txt"),
    layout_instruction: include_str!("../assets/v1/layout_instruction.txt"),
    layout_task: include_str!("../assets/v1/layout_task.txt"),
    onestep_cot: include_str!("../assets/v1/onestep_cot.txt"),
    onestep_nocot: include_str!("../assets/v1/onestep_nocot.txt"),
};

pub const PROMPT_VERSIONS: [&str; 1] = ["v1"];

impl PromptAssets {
    pub fn for_version(version: &str) -> Result<&'static PromptAssets, PromptError> {
        match version {
            "v1" => Ok(&V1),
            other => Err(PromptError::UnknownVersion(other.to_string())),
        }
    }
}
