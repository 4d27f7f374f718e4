use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use adlayout_core::layout::{ElementConstraint, Layout, Rect};
use adlayout_core::metrics::{MetricReport, ViolationReport};
use adlayout_prompt::PlacementPlan;

use super::PipelineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub backend: String,
    pub prompt_version: String,
}

/// Write-once provenance for one generated sample: everything needed to
/// re-render metric and violation tables. Wall-clock data lives in the
/// sidecar so record files stay byte-stable across runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub run_id: String,
    pub condition: String,
    pub seed: u64,
    pub sample_id: String,
    pub image: String,
    pub constraint: ElementConstraint,
    pub prompt_canvas: Rect,
    pub model: ModelMeta,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plan_prompt: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plan_response: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plan: Option<PlacementPlan>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub layout_prompt: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub layout_response: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub layout: Option<Layout>,
    pub coerced_coordinates: bool,
    pub repair_attempts: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metrics: Option<MetricReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violations: Option<ViolationReport>,
}

/// Timing sidecar, excluded from determinism comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordMeta {
    pub wall_start_unix_ms: u128,
    pub duration_ms: u128,
    pub call_latencies_ms: Vec<u64>,
}

pub fn record_file_name(condition: &str, sample_id: &str) -> String {
    format!("{condition}__{sample_id}.json")
}

impl GenerationRecord {
    pub fn path_in(&self, records_dir: &Path) -> PathBuf {
        records_dir.join(record_file_name(&self.condition, &self.sample_id))
    }

    /// Atomic write (temp file + rename), with the timing sidecar next to
    /// the record.
    pub fn write(&self, records_dir: &Path, meta: &RecordMeta) -> Result<(), PipelineError> {
        std::fs::create_dir_all(records_dir)?;
        let path = self.path_in(records_dir);
        let mut body = serde_json::to_string_pretty(self)?;
        body.push('\n');
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, body)?;
        std::fs::rename(&tmp, &path)?;

        let meta_path = records_dir.join(format!("{}__{}.meta.json", self.condition, self.sample_id));
        let mut meta_body = serde_json::to_string_pretty(meta)?;
        meta_body.push('\n');
        std::fs::write(meta_path, meta_body)?;
        Ok(())
    }

    /// Load and re-verify that the embedded condition and sample id match
    /// the file name, so records never cross between conditions.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let raw = std::fs::read_to_string(path)?;
        let record: GenerationRecord = serde_json::from_str(&raw)?;
        let expected = record_file_name(&record.condition, &record.sample_id);
        if path.file_name().and_then(|n| n.to_str()) != Some(expected.as_str()) {
            return Err(PipelineError::RecordMismatch {
                path: path.display().to_string(),
                expected,
            });
        }
        Ok(record)
    }
}
