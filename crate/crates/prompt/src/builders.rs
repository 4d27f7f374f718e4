use std::path::Path;

use adlayout_core::layout::{serialize_layout_html, ElementConstraint, Rect};

use super::assets::PromptAssets;
use super::bundle::BundleBuilder;
use super::plan::PlacementPlan;
use super::store::Exemplar;
use super::{PromptBundle, PromptError};

const MAX_EXEMPLARS: usize = 16;

fn check_shot_count(exemplars: &[&Exemplar]) -> Result<(), PromptError> {
    if exemplars.len() > MAX_EXEMPLARS {
        return Err(PromptError::TooManyExemplars(exemplars.len()));
    }
    Ok(())
}

fn check_plan_covers(
    plan: &PlacementPlan,
    constraint: &ElementConstraint,
) -> Result<(), PromptError> {
    let missing: Vec<String> = constraint
        .items()
        .iter()
        .filter(|&&(c, i)| !plan.directives().iter().any(|d| d.category == c && d.index == i))
        .map(|&(c, i)| format!("{c} {i}"))
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(PromptError::PlanConstraintMismatch(missing.join(", ")))
    }
}

/// Step-1 prompt: instruction, shared constraint, exemplar blocks of
/// image + element constraint + placement plan, then the test sample.
pub fn build_plan_prompt(
    exemplars: &[&Exemplar],
    test_image: &Path,
    constraint: &ElementConstraint,
    assets: &PromptAssets,
) -> Result<PromptBundle, PromptError> {
    check_shot_count(exemplars)?;
    let mut b = BundleBuilder::new();
    b.text(&format!(
        "Instruction\n{}\nConstraint\n- {}\n\n",
        assets.plan_instruction, assets.plan_constraint
    ));
    for (i, ex) in exemplars.iter().enumerate() {
        if ex.plan.directives().is_empty() {
            return Err(PromptError::ExemplarMissingPlan(ex.id.clone()));
        }
        let n = i + 1;
        b.text(&format!("Example {n}\n"));
        b.image(&ex.image);
        b.text(&format!(
            "Element Type Constraint: {}\n\nExample Output {n}\nPlacement Plan:\n{}\n\n",
            ex.constraint,
            ex.plan.raw()
        ));
    }
    b.text("Test Sample\n");
    b.image(test_image);
    b.text(&format!("Element Type Constraint: {constraint}\n"));
    Ok(b.finish("plan", exemplars.len()))
}

fn canvas_line(canvas: &Rect) -> String {
    format!("Canvas Size: canvas width is {}px, canvas height is {}px", canvas.w(), canvas.h())
}

fn layout_header(assets: &PromptAssets, canvas: &Rect, extra: Option<&str>) -> String {
    let mut head = format!(
        "Instruction: {}\nTask Description: {}\n{}\n",
        assets.layout_instruction,
        assets.layout_task,
        canvas_line(canvas)
    );
    if let Some(line) = extra {
        head.push_str(line);
        head.push('\n');
    }
    head.push('\n');
    head
}

/// Step-2 prompt: layout-generation scaffolding plus exemplar blocks of
/// image + constraint + plan + HTML output, then the test sample with the
/// step-1 plan.
pub fn build_layout_prompt(
    exemplars: &[&Exemplar],
    test_image: &Path,
    constraint: &ElementConstraint,
    plan: &PlacementPlan,
    canvas: &Rect,
    assets: &PromptAssets,
) -> Result<PromptBundle, PromptError> {
    check_shot_count(exemplars)?;
    check_plan_covers(plan, constraint)?;
    let mut b = BundleBuilder::new();
    b.text(&layout_header(assets, canvas, None));
    for (i, ex) in exemplars.iter().enumerate() {
        if ex.plan.directives().is_empty() {
            return Err(PromptError::ExemplarMissingPlan(ex.id.clone()));
        }
        let n = i + 1;
        b.text(&format!("Example {n}\n"));
        b.image(&ex.image);
        b.text(&format!(
            "Element Type Constraint: {}\nPlacement Plan:\n{}\n\nExample Output {n}\n{}\n\n",
            ex.constraint,
            ex.plan.raw(),
            serialize_layout_html(&ex.layout)
        ));
    }
    b.text("Test Sample\n");
    b.image(test_image);
    b.text(&format!("Element Type Constraint: {constraint}\nPlacement Plan:\n{}\n", plan.raw()));
    Ok(b.finish("layout", exemplars.len()))
}

/// One-step prompt: the layout scaffolding with an output-format line.
/// With `cot` the model is asked for plan-then-code in one response and
/// exemplar outputs concatenate plan and HTML; without it (the baseline
/// condition) only HTML is requested and shown.
pub fn build_one_step_prompt(
    exemplars: &[&Exemplar],
    test_image: &Path,
    constraint: &ElementConstraint,
    cot: bool,
    canvas: &Rect,
    assets: &PromptAssets,
) -> Result<PromptBundle, PromptError> {
    check_shot_count(exemplars)?;
    let extra = if cot { assets.onestep_cot } else { assets.onestep_nocot };
    let mut b = BundleBuilder::new();
    b.text(&layout_header(assets, canvas, Some(extra)));
    for (i, ex) in exemplars.iter().enumerate() {
        let n = i + 1;
        b.text(&format!("Example {n}\n"));
        b.image(&ex.image);
        let output = if cot {
            if ex.plan.directives().is_empty() {
                return Err(PromptError::ExemplarMissingPlan(ex.id.clone()));
            }
            format!(
                "Placement Plan:\n{}\n\n{}",
                ex.plan.raw(),
                serialize_layout_html(&ex.layout)
            )
        } else {
            serialize_layout_html(&ex.layout)
        };
        b.text(&format!(
            "Element Type Constraint: {}\n\nExample Output {n}\n{output}\n\n",
            ex.constraint
        ));
    }
    b.text("Test Sample\n");
    b.image(test_image);
    b.text(&format!("Element Type Constraint: {constraint}\n"));
    let tag = if cot { "onestep_cot" } else { "onestep_nocot" };
    Ok(b.finish(tag, exemplars.len()))
}
