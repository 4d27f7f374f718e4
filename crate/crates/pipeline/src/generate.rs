use std::path::Path;

use adlayout_client::{
    encode_image, ChatMessage, ChatTransport, ClientError, MessagePart, ModelRequest,
    ModelResponse, Role,
};
use adlayout_core::layout::{
    extract_html_block, parse_layout_html, salvage_layout_html, ElementConstraint, Layout, Rect,
};
use adlayout_prompt::{
    build_layout_prompt, build_one_step_prompt, build_plan_prompt, parse_plan, ExemplarStore,
    PlacementPlan, PromptAssets, PromptBundle, PromptPart,
};

use super::{PipelineError, LAYOUT_PARSE_FAILED, PLAN_PARSE_FAILED};

/// Everything a single generation call needs besides the sample itself.
pub struct GenContext<'a> {
    pub client: &'a dyn ChatTransport,
    pub store: &'a ExemplarStore,
    pub assets: &'static PromptAssets,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub canvas: Rect,
    pub shuffle_seed: Option<u64>,
    pub max_repair_attempts: u32,
}

/// What one generation produced. Per-sample problems land in `failure`;
/// only systemic transport/config errors surface as `Err` from the
/// generate functions.
#[derive(Debug, Clone, Default)]
pub struct GenOutcome {
    pub plan_prompt: Option<String>,
    pub plan_response: Option<String>,
    pub plan: Option<PlacementPlan>,
    pub layout_prompt: Option<String>,
    pub layout_response: Option<String>,
    pub layout: Option<Layout>,
    pub coerced: bool,
    pub repair_attempts: u32,
    pub failure: Option<String>,
    pub latencies_ms: Vec<u64>,
}

enum Call {
    Reply(ModelResponse),
    SampleFailure(String),
}

fn classify(error: ClientError) -> Result<Call, PipelineError> {
    match error {
        // Missing cassette entries and malformed payloads are sample-level;
        // auth, rate limiting, and transport failures poison the whole run.
        ClientError::CassetteMiss { .. } | ClientError::MalformedResponse(_) => {
            Ok(Call::SampleFailure(error.to_string()))
        }
        other => Err(PipelineError::Client(other)),
    }
}

fn chat(ctx: &GenContext<'_>, request: &ModelRequest) -> Result<Call, PipelineError> {
    match ctx.client.chat(request) {
        Ok(response) => Ok(Call::Reply(response)),
        Err(error) => classify(error),
    }
}

/// Encode a prompt bundle into a wire request (image parts become base64
/// payloads with content digests).
pub(crate) fn request_from_bundle(
    ctx: &GenContext<'_>,
    bundle: &PromptBundle,
) -> Result<ModelRequest, PipelineError> {
    let mut messages = Vec::with_capacity(bundle.messages.len());
    for m in &bundle.messages {
        let mut parts = Vec::with_capacity(m.parts.len());
        for part in &m.parts {
            match part {
                PromptPart::Text(t) => parts.push(MessagePart::Text(t.clone())),
                PromptPart::Image(path) => parts.push(MessagePart::Image(encode_image(path)?)),
            }
        }
        let role = match m.role {
            adlayout_prompt::Role::System => Role::System,
            adlayout_prompt::Role::User => Role::User,
            adlayout_prompt::Role::Assistant => Role::Assistant,
        };
        messages.push(ChatMessage { role, parts });
    }
    let mut request = ModelRequest::new(ctx.model.clone(), messages);
    request.temperature = ctx.temperature;
    request.top_p = ctx.top_p;
    request.max_tokens = ctx.max_tokens;
    Ok(request)
}

enum ParseAttempt {
    Ok(Layout, bool),
    Mismatch(Layout, bool, String),
    Failed(String),
}

fn try_parse(raw: &str, constraint: &ElementConstraint, canvas: &Rect) -> ParseAttempt {
    let block = match extract_html_block(raw) {
        Ok(b) => b,
        Err(e) => return ParseAttempt::Failed(e.to_string()),
    };
    match parse_layout_html(&block, Some(*canvas)) {
        Ok(parsed) => {
            let violations =
                adlayout_core::metrics::check_violations(&parsed.layout, constraint);
            if violations.constraint_mismatch {
                let got = ElementConstraint::of_layout(&parsed.layout);
                ParseAttempt::Mismatch(
                    parsed.layout,
                    parsed.coerced,
                    format!("constraint mismatch: requested [{constraint}], got [{got}]"),
                )
            } else {
                ParseAttempt::Ok(parsed.layout, parsed.coerced)
            }
        }
        Err(e) => ParseAttempt::Failed(e.to_string()),
    }
}

fn repair_message(reason: &str, constraint: &ElementConstraint, canvas: &Rect) -> String {
    format!(
        "Your previous response could not be used: {reason}. Respond again with the layout as HTML only: a <div class=\"canvas\" style=\"left:0px; top:0px; width:{}px; height:{}px\"></div> followed by exactly one div per requested element, in the order of the Element Type Constraint ({constraint}), each with class and style=\"left:..px; top:..px; width:..px; height:..px\".",
        canvas.w(),
        canvas.h()
    )
}

struct RepairResult {
    layout: Option<Layout>,
    coerced: bool,
    attempts: u32,
    last_response: String,
    failure: Option<String>,
    latencies_ms: Vec<u64>,
}

/// Parse a model response into a layout, re-prompting on failure (up to
/// `max_attempts` times) and finally falling back to deterministic salvage.
/// A parseable layout with the wrong element multiset also triggers repair
/// but is kept (and later flagged) if repairs run out.
fn parse_with_repair(
    ctx: &GenContext<'_>,
    base_request: &ModelRequest,
    first_response: ModelResponse,
    constraint: &ElementConstraint,
) -> Result<RepairResult, PipelineError> {
    let mut attempts = 0u32;
    let mut raw = first_response.text;
    let mut latencies = vec![first_response.latency_ms];
    loop {
        let reason = match try_parse(&raw, constraint, &ctx.canvas) {
            ParseAttempt::Ok(layout, coerced) => {
                return Ok(RepairResult {
                    layout: Some(layout),
                    coerced,
                    attempts,
                    last_response: raw,
                    failure: None,
                    latencies_ms: latencies,
                })
            }
            ParseAttempt::Mismatch(layout, coerced, reason) => {
                if attempts >= ctx.max_repair_attempts {
                    // Keep the layout; the violation checker flags it.
                    return Ok(RepairResult {
                        layout: Some(layout),
                        coerced,
                        attempts,
                        last_response: raw,
                        failure: None,
                        latencies_ms: latencies,
                    });
                }
                reason
            }
            ParseAttempt::Failed(reason) => {
                if attempts >= ctx.max_repair_attempts {
                    if let Some(salvaged) = salvage_layout_html(&raw, Some(ctx.canvas)) {
                        return Ok(RepairResult {
                            layout: Some(salvaged.layout),
                            coerced: salvaged.coerced,
                            attempts,
                            last_response: raw,
                            failure: None,
                            latencies_ms: latencies,
                        });
                    }
                    return Ok(RepairResult {
                        layout: None,
                        coerced: false,
                        attempts,
                        last_response: raw,
                        failure: Some(format!("{LAYOUT_PARSE_FAILED}: {reason}")),
                        latencies_ms: latencies,
                    });
                }
                reason
            }
        };

        attempts += 1;
        let mut repair_request = base_request.clone();
        repair_request.messages.push(ChatMessage::assistant_text(raw.clone()));
        repair_request
            .messages
            .push(ChatMessage::user_text(repair_message(&reason, constraint, &ctx.canvas)));
        match chat(ctx, &repair_request)? {
            Call::Reply(response) => {
                latencies.push(response.latency_ms);
                raw = response.text;
            }
            Call::SampleFailure(message) => {
                return Ok(RepairResult {
                    layout: None,
                    coerced: false,
                    attempts,
                    last_response: raw,
                    failure: Some(format!("{LAYOUT_PARSE_FAILED}: repair call failed: {message}")),
                    latencies_ms: latencies,
                })
            }
        }
    }
}

/// Standalone repair entry point: given a raw model output that failed to
/// parse (or parsed against the wrong multiset), run the repair loop and
/// salvage. Used by the two generate functions and exposed for reuse.
pub fn repair_layout(
    ctx: &GenContext<'_>,
    base_request: &ModelRequest,
    raw_output: &str,
    constraint: &ElementConstraint,
) -> Result<(Option<Layout>, u32), PipelineError> {
    let seed_response = ModelResponse {
        text: raw_output.to_string(),
        usage: None,
        latency_ms: 0,
        raw: None,
    };
    let result = parse_with_repair(ctx, base_request, seed_response, constraint)?;
    Ok((result.layout, result.attempts))
}

/// Plan-then-layout generation: build the step-1 prompt, parse the plan,
/// feed it into the step-2 prompt, parse the layout with repair.
pub fn generate_two_step(
    ctx: &GenContext<'_>,
    image: &Path,
    constraint: &ElementConstraint,
    shots: usize,
) -> Result<GenOutcome, PipelineError> {
    let exemplars = ctx.store.take(shots, ctx.shuffle_seed)?;
    let plan_bundle = build_plan_prompt(&exemplars, image, constraint, ctx.assets)?;
    let plan_request = request_from_bundle(ctx, &plan_bundle)?;
    let mut outcome = GenOutcome {
        plan_prompt: Some(plan_bundle.render_text()),
        ..Default::default()
    };

    let plan_response = match chat(ctx, &plan_request)? {
        Call::Reply(r) => r,
        Call::SampleFailure(message) => {
            outcome.failure = Some(format!("{PLAN_PARSE_FAILED}: call failed: {message}"));
            return Ok(outcome);
        }
    };
    outcome.latencies_ms.push(plan_response.latency_ms);
    outcome.plan_response = Some(plan_response.text.clone());
    let plan = match parse_plan(&plan_response.text, constraint) {
        Ok(p) => p,
        Err(e) => {
            outcome.failure = Some(format!("{PLAN_PARSE_FAILED}: {e}"));
            return Ok(outcome);
        }
    };
    outcome.plan = Some(plan.clone());

    let layout_bundle =
        build_layout_prompt(&exemplars, image, constraint, &plan, &ctx.canvas, ctx.assets)?;
    let layout_request = request_from_bundle(ctx, &layout_bundle)?;
    outcome.layout_prompt = Some(layout_bundle.render_text());
    let first = match chat(ctx, &layout_request)? {
        Call::Reply(r) => r,
        Call::SampleFailure(message) => {
            outcome.failure = Some(format!("{LAYOUT_PARSE_FAILED}: call failed: {message}"));
            return Ok(outcome);
        }
    };
    let repair = parse_with_repair(ctx, &layout_request, first, constraint)?;
    outcome.layout_response = Some(repair.last_response);
    outcome.layout = repair.layout;
    outcome.coerced = repair.coerced;
    outcome.repair_attempts = repair.attempts;
    outcome.failure = repair.failure;
    outcome.latencies_ms.extend(repair.latencies_ms);
    Ok(outcome)
}

/// Single-call generation; any plan prose around the HTML stays verbatim
/// in the recorded response text.
pub fn generate_one_step(
    ctx: &GenContext<'_>,
    image: &Path,
    constraint: &ElementConstraint,
    shots: usize,
    cot: bool,
) -> Result<GenOutcome, PipelineError> {
    let exemplars = ctx.store.take(shots, ctx.shuffle_seed)?;
    let bundle = build_one_step_prompt(&exemplars, image, constraint, cot, &ctx.canvas, ctx.assets)?;
    let request = request_from_bundle(ctx, &bundle)?;
    let mut outcome = GenOutcome {
        layout_prompt: Some(bundle.render_text()),
        ..Default::default()
    };
    let first = match chat(ctx, &request)? {
        Call::Reply(r) => r,
        Call::SampleFailure(message) => {
            outcome.failure = Some(format!("{LAYOUT_PARSE_FAILED}: call failed: {message}"));
            return Ok(outcome);
        }
    };
    let repair = parse_with_repair(ctx, &request, first, constraint)?;
    outcome.layout_response = Some(repair.last_response);
    outcome.layout = repair.layout;
    outcome.coerced = repair.coerced;
    outcome.repair_attempts = repair.attempts;
    outcome.failure = repair.failure;
    outcome.latencies_ms.extend(repair.latencies_ms);
    Ok(outcome)
}
