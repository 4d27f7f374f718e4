use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use adlayout_client::ChatTransport;
use adlayout_core::layout::{ElementConstraint, Rect};
use adlayout_core::metrics::{
    check_violations, violation_rate, MetricOptions, MetricReport, UtilityDenominator,
};
use adlayout_prompt::{sample_constraint, ExemplarStore, PromptAssets};

use super::conditions::Condition;
use super::dataset::{DatasetManifest, ManifestEntry};
use super::generate::{generate_one_step, generate_two_step, GenContext};
use super::record::{GenerationRecord, ModelMeta, RecordMeta};
use super::scoring::score_scaled;
use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintSource {
    GroundTruth,
    Sampled,
}

impl std::str::FromStr for ConstraintSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "groundtruth" => Ok(ConstraintSource::GroundTruth),
            "sampled" => Ok(ConstraintSource::Sampled),
            other => Err(format!(
                "unknown constraint source {other:?} (expected groundtruth or sampled)"
            )),
        }
    }
}

/// Resolved configuration of one run; echoed into run.toml.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub run_id: String,
    pub dataset: PathBuf,
    pub store: PathBuf,
    pub conditions: Vec<Condition>,
    pub n_samples: usize,
    pub seed: u64,
    pub backend: String,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub theta: f64,
    pub min_area_ratio: String,
    pub utility_denominator: UtilityDenominator,
    pub constraint_source: ConstraintSource,
    pub prompt_version: String,
    pub canvas: (i64, i64),
    pub concurrency: usize,
    pub shuffle_exemplars: Option<u64>,
    pub max_repair_attempts: u32,
}

impl RunConfig {
    pub fn metric_options(&self) -> Result<MetricOptions, PipelineError> {
        Ok(MetricOptions {
            min_area_ratio: parse_ratio(&self.min_area_ratio)?,
            theta: self.theta,
            utility_denominator: self.utility_denominator,
        })
    }

    pub fn prompt_canvas(&self) -> Rect {
        Rect::new(0, 0, self.canvas.0, self.canvas.1).expect("validated at config build")
    }
}

pub fn parse_ratio(s: &str) -> Result<Ratio<i64>, PipelineError> {
    let parse = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| PipelineError::Config(format!("cannot parse ratio component {t:?}")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse(den)?;
            if den == 0 {
                return Err(PipelineError::Config("ratio denominator is zero".into()));
            }
            Ok(Ratio::new(parse(num)?, den))
        }
        None => Ok(Ratio::from_integer(parse(s)?)),
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub run_dir: PathBuf,
    pub records: usize,
    pub failures: usize,
    pub rows: Vec<AggregateRow>,
}

/// One aggregate table row: metric columns in Table order plus the
/// violation percentage.
#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub condition: String,
    pub values: [Option<f64>; 8],
    pub violation_rate_pct: f64,
    pub samples: usize,
    pub failures: usize,
}

pub const AGGREGATE_HEADER: &str = "condition,Val,Ove,Ali,Und_l,Und_s,Uti,Occ,Rea";
pub const VIOLATIONS_HEADER: &str = "Method,Violation Rate (%)";

fn fnv64(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Seeded uniform sample of up to `n` manifest entries, order = draw order.
pub(crate) fn select_samples<'m>(
    manifest: &'m DatasetManifest,
    n: usize,
    seed: u64,
) -> Vec<&'m ManifestEntry> {
    let len = manifest.entries.len();
    let n = n.min(len);
    let mut indices: Vec<usize> = (0..len).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let j = rng.gen_range(i..len);
        indices.swap(i, j);
    }
    indices[..n].iter().map(|&i| &manifest.entries[i]).collect()
}

fn constraint_for(
    config: &RunConfig,
    manifest: &DatasetManifest,
    entry: &ManifestEntry,
) -> Result<ElementConstraint, PipelineError> {
    match config.constraint_source {
        ConstraintSource::GroundTruth => {
            let gt = entry.gt_layout.as_ref().ok_or_else(|| {
                PipelineError::Config(format!(
                    "sample {} has no ground-truth layout; use --constraint-source sampled",
                    entry.id
                ))
            })?;
            let categories: Vec<_> = gt.elements().iter().map(|e| e.category()).collect();
            ElementConstraint::from_categories(&categories)
                .map_err(|e| PipelineError::Config(e.to_string()))
        }
        ConstraintSource::Sampled => {
            let annotations = manifest.annotation_categories();
            // Constraints are derived per sample (stable under resume) and
            // shared across conditions for comparability.
            let seed = config.seed ^ fnv64(&entry.id);
            sample_constraint(&annotations, seed)
                .map_err(|e| PipelineError::Config(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct RunEcho<'a> {
    run: &'a RunConfig,
    resolved: ResolvedEcho,
}

#[derive(Serialize)]
struct ResolvedEcho {
    samples: Vec<String>,
}

struct Task<'m> {
    condition: Condition,
    entry: &'m ManifestEntry,
    constraint: ElementConstraint,
}

/// Execute conditions x samples, skipping records that already exist
/// (resume), then write aggregate.csv and violations.csv. Per-sample
/// failures are recorded and degrade the aggregate; only systemic
/// failures abort.
pub fn run_experiment(
    config: &RunConfig,
    run_dir: &Path,
    manifest: &DatasetManifest,
    store: &ExemplarStore,
    client: &dyn ChatTransport,
) -> Result<RunSummary, PipelineError> {
    if config.canvas.0 <= 0 || config.canvas.1 <= 0 {
        return Err(PipelineError::Config("canvas must be positive".into()));
    }
    config.metric_options()?; // validate early
    let assets = PromptAssets::for_version(&config.prompt_version)?;
    std::fs::create_dir_all(run_dir)?;
    let records_dir = run_dir.join("records");
    std::fs::create_dir_all(&records_dir)?;

    let samples = select_samples(manifest, config.n_samples, config.seed);
    let echo = RunEcho {
        run: config,
        resolved: ResolvedEcho { samples: samples.iter().map(|e| e.id.clone()).collect() },
    };
    std::fs::write(run_dir.join("run.toml"), toml::to_string_pretty(&echo)?)?;

    let mut tasks: VecDeque<Task<'_>> = VecDeque::new();
    for condition in &config.conditions {
        for entry in &samples {
            tasks.push_back(Task {
                condition: *condition,
                entry,
                constraint: constraint_for(config, manifest, entry)?,
            });
        }
    }

    let queue = Mutex::new(tasks);
    let errors: Mutex<Vec<PipelineError>> = Mutex::new(Vec::new());
    let abort = AtomicBool::new(false);
    let workers = config.concurrency.max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if abort.load(Ordering::SeqCst) {
                    return;
                }
                let task = match queue.lock().expect("task queue").pop_front() {
                    Some(t) => t,
                    None => return,
                };
                if let Err(e) = run_task(config, assets, &records_dir, manifest, store, client, &task)
                {
                    abort.store(true, Ordering::SeqCst);
                    errors.lock().expect("error sink").push(e);
                    return;
                }
            });
        }
    });
    if let Some(e) = errors.into_inner().expect("error sink").into_iter().next() {
        return Err(e);
    }

    aggregate_run(config, run_dir, manifest, None)
}

fn run_task(
    config: &RunConfig,
    assets: &'static PromptAssets,
    records_dir: &Path,
    manifest: &DatasetManifest,
    store: &ExemplarStore,
    client: &dyn ChatTransport,
    task: &Task<'_>,
) -> Result<(), PipelineError> {
    let record_path =
        records_dir.join(super::record::record_file_name(&task.condition.name(), &task.entry.id));
    if record_path.is_file() {
        // Resume: re-verify the embedded key, then keep the record as is.
        GenerationRecord::load(&record_path)?;
        return Ok(());
    }

    let started = Instant::now();
    let wall_start_unix_ms =
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    let ctx = GenContext {
        client,
        store,
        assets,
        model: config.model.clone(),
        temperature: config.temperature,
        top_p: config.top_p,
        max_tokens: config.max_tokens,
        canvas: config.prompt_canvas(),
        shuffle_seed: config.shuffle_exemplars,
        max_repair_attempts: config.max_repair_attempts,
    };
    let image_path = manifest.image_path(task.entry);
    let outcome = if task.condition.two_step() {
        generate_two_step(&ctx, &image_path, &task.constraint, task.condition.shots())?
    } else {
        generate_one_step(
            &ctx,
            &image_path,
            &task.constraint,
            task.condition.shots(),
            task.condition.cot(),
        )?
    };

    let (metrics, violations) = match &outcome.layout {
        Some(layout) => {
            let opts = config.metric_options()?;
            let report = score_scaled(layout, manifest, task.entry, &opts)?;
            let violations = check_violations(layout, &task.constraint);
            (Some(report), Some(violations))
        }
        None => (None, None),
    };

    let record = GenerationRecord {
        run_id: config.run_id.clone(),
        condition: task.condition.name(),
        seed: config.seed,
        sample_id: task.entry.id.clone(),
        image: task.entry.image.clone(),
        constraint: task.constraint.clone(),
        prompt_canvas: config.prompt_canvas(),
        model: ModelMeta {
            model: config.model.clone(),
            temperature: config.temperature,
            top_p: config.top_p,
            max_tokens: config.max_tokens,
            backend: config.backend.clone(),
            prompt_version: config.prompt_version.clone(),
        },
        plan_prompt: outcome.plan_prompt,
        plan_response: outcome.plan_response,
        plan: outcome.plan,
        layout_prompt: outcome.layout_prompt,
        layout_response: outcome.layout_response,
        layout: outcome.layout,
        coerced_coordinates: outcome.coerced,
        repair_attempts: outcome.repair_attempts,
        failure: outcome.failure,
        metrics,
        violations,
    };
    let meta = RecordMeta {
        wall_start_unix_ms,
        duration_ms: started.elapsed().as_millis(),
        call_latencies_ms: outcome.latencies_ms,
    };
    record.write(records_dir, &meta)
}

/// Fold completed records into aggregate.csv (metric columns in Table
/// order) and violations.csv. With `rescore`, metrics are recomputed from
/// the recorded layouts under the new options; record files are untouched.
pub fn aggregate_run(
    config: &RunConfig,
    run_dir: &Path,
    manifest: &DatasetManifest,
    rescore: Option<&MetricOptions>,
) -> Result<RunSummary, PipelineError> {
    let records_dir = run_dir.join("records");
    let samples = select_samples(manifest, config.n_samples, config.seed);
    let mut rows = Vec::new();
    let mut total_records = 0usize;
    let mut total_failures = 0usize;
    for condition in &config.conditions {
        let mut reports: Vec<MetricReport> = Vec::new();
        let mut violation_reports = Vec::new();
        let mut validity_sum = 0.0f64;
        let mut failures = 0usize;
        let mut n = 0usize;
        for entry in &samples {
            let path = records_dir
                .join(super::record::record_file_name(&condition.name(), &entry.id));
            if !path.is_file() {
                continue; // partial run; aggregate what exists
            }
            let record = GenerationRecord::load(&path)?;
            total_records += 1;
            n += 1;
            let metrics = match (rescore, &record.layout) {
                (Some(opts), Some(layout)) => Some(score_scaled(layout, manifest, entry, opts)?),
                (None, _) => record.metrics.clone(),
                (Some(_), None) => None,
            };
            let failed = record.failure.is_some();
            if failed {
                failures += 1;
                total_failures += 1;
            }
            if let Some(report) = metrics {
                validity_sum += report.validity;
                reports.push(report);
            }
            // A sample that produced nothing counts as a violation.
            let has_violation =
                record.violations.as_ref().map(|v| v.has_violation).unwrap_or(true) || failed;
            violation_reports.push(adlayout_core::metrics::ViolationReport {
                constraint_mismatch: record
                    .violations
                    .as_ref()
                    .map(|v| v.constraint_mismatch)
                    .unwrap_or(true),
                orphan_underlays: record
                    .violations
                    .as_ref()
                    .map(|v| v.orphan_underlays.clone())
                    .unwrap_or_default(),
                has_violation,
            });
        }
        if n == 0 {
            continue;
        }
        // Failed samples contribute validity 0 rather than being dropped.
        let validity_all = validity_sum / n as f64;
        let mut values: [Option<f64>; 8] = Default::default();
        if reports.is_empty() {
            values[0] = Some(0.0);
        } else {
            let agg = adlayout_core::metrics::aggregate(&reports)?;
            values = agg.column_values();
            values[0] = Some(validity_all);
        }
        rows.push(AggregateRow {
            condition: condition.name(),
            values,
            violation_rate_pct: violation_rate(&violation_reports),
            samples: n,
            failures,
        });
    }

    write_aggregate_csv(&run_dir.join("aggregate.csv"), &rows)?;
    write_violations_csv(&run_dir.join("violations.csv"), &rows)?;
    Ok(RunSummary { run_dir: run_dir.to_path_buf(), records: total_records, failures: total_failures, rows })
}

fn write_aggregate_csv(path: &Path, rows: &[AggregateRow]) -> Result<(), PipelineError> {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.condition);
        for value in &row.values {
            out.push(',');
            if let Some(v) = value {
                out.push_str(&format!("{v}"));
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_violations_csv(path: &Path, rows: &[AggregateRow]) -> Result<(), PipelineError> {
    let mut out = String::from(VIOLATIONS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!("{},{:.2}\n", row.condition, row.violation_rate_pct));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("1/1000").unwrap(), Ratio::new(1, 1000));
        assert_eq!(parse_ratio("0").unwrap(), Ratio::from_integer(0));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("a/b").is_err());
    }

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv64("s1"), fnv64("s1"));
        assert_ne!(fnv64("s1"), fnv64("s2"));
    }
}
