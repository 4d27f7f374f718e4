use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use adlayout_core::layout::{scale_layout, Category, Element, Layout, Rect};
use adlayout_core::{PROMPT_CANVAS_H, PROMPT_CANVAS_W};

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Generic,
    PkuPosterLayout,
}

impl FromStr for DatasetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "generic" => Ok(DatasetKind::Generic),
            "pku-posterlayout" => Ok(DatasetKind::PkuPosterLayout),
            other => Err(format!(
                "unknown dataset kind {other:?} (expected generic or pku-posterlayout)"
            )),
        }
    }
}

/// One background image with its native size, optional precomputed
/// saliency map, and optional ground-truth layout in prompt-canvas
/// coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub image: String,
    pub width: u32,
    pub height: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub saliency: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gt_layout: Option<Layout>,
}

/// Normalized dataset description. Paths are relative to the manifest
/// file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub canvas: (i64, i64),
    pub entries: Vec<ManifestEntry>,
    #[serde(skip)]
    root: PathBuf,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let raw = std::fs::read_to_string(path)?;
        let mut manifest: DatasetManifest = serde_json::from_str(&raw)?;
        manifest.root = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn image_path(&self, entry: &ManifestEntry) -> PathBuf {
        self.root.join(&entry.image)
    }

    pub fn saliency_path(&self, entry: &ManifestEntry) -> Option<PathBuf> {
        entry.saliency.as_ref().map(|s| self.root.join(s))
    }

    pub fn entry(&self, id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Ground-truth category bags for constraint sampling.
    pub fn annotation_categories(&self) -> Vec<Vec<Category>> {
        self.entries
            .iter()
            .filter_map(|e| e.gt_layout.as_ref())
            .map(|l| l.elements().iter().map(|el| el.category()).collect())
            .collect()
    }
}

/// A row-level import problem; collected, never fatal.
#[derive(Debug, Clone, Serialize)]
pub struct ImportProblem {
    pub row: usize,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug)]
pub struct ImportReport {
    pub manifest: DatasetManifest,
    pub problems: Vec<ImportProblem>,
}

struct RawElement {
    row: usize,
    category: Category,
    rect: Rect,
}

/// Normalize a source directory (images/ + annotations.csv + optional
/// saliency/) into a manifest. Ground-truth boxes are scaled into the
/// 102x150 prompt canvas; native sizes are retained for metric grids.
pub fn import_dataset(source: &Path, kind: DatasetKind) -> Result<ImportReport, PipelineError> {
    let images_dir = source.join("images");
    if !images_dir.is_dir() {
        return Err(PipelineError::Dataset(format!(
            "source {} has no images/ directory",
            source.display()
        )));
    }
    let annotations = source.join("annotations.csv");
    let mut problems = Vec::new();
    let mut by_image: BTreeMap<String, Vec<RawElement>> = BTreeMap::new();
    if annotations.is_file() {
        let mut reader = csv::Reader::from_path(&annotations)
            .map_err(|e| PipelineError::Dataset(format!("cannot read annotations: {e}")))?;
        for (i, row) in reader.records().enumerate() {
            let rownum = i + 2; // header is line 1
            let record = match row {
                Ok(r) => r,
                Err(e) => {
                    problems.push(ImportProblem {
                        row: rownum,
                        kind: "MalformedAnnotation",
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            match parse_row(&record, kind) {
                Ok((image, element)) => {
                    by_image.entry(image).or_default().push(RawElement {
                        row: rownum,
                        category: element.0,
                        rect: element.1,
                    });
                }
                Err(message) => problems.push(ImportProblem {
                    row: rownum,
                    kind: "MalformedAnnotation",
                    message,
                }),
            }
        }
    } else {
        return Err(PipelineError::Dataset(format!(
            "source {} has no annotations.csv",
            source.display()
        )));
    }

    // Annotation rows that reference images that are not on disk.
    let mut missing: Vec<String> = Vec::new();
    for (image, rows) in &by_image {
        if !images_dir.join(image).is_file() {
            for raw in rows {
                problems.push(ImportProblem {
                    row: raw.row,
                    kind: "MissingImage",
                    message: format!("image {image} not found under images/"),
                });
            }
            missing.push(image.clone());
        }
    }
    for image in missing {
        by_image.remove(&image);
    }

    // Every decodable image on disk becomes an entry, annotated or not.
    let mut names: Vec<String> = Vec::new();
    for dirent in std::fs::read_dir(&images_dir)? {
        let dirent = dirent?;
        let name = dirent.file_name().to_string_lossy().to_string();
        if matches!(
            Path::new(&name).extension().and_then(|e| e.to_str()),
            Some("png") | Some("jpg") | Some("jpeg")
        ) {
            names.push(name);
        }
    }
    names.sort();

    let mut entries = Vec::new();
    for name in names {
        let path = images_dir.join(&name);
        let (width, height) = match image::image_dimensions(&path) {
            Ok(d) => d,
            Err(e) => {
                problems.push(ImportProblem {
                    row: 0,
                    kind: "MissingImage",
                    message: format!("cannot decode {name}: {e}"),
                });
                continue;
            }
        };
        let stem = Path::new(&name).file_stem().unwrap_or_default().to_string_lossy().to_string();
        let saliency = ["png", "pgm"].iter().find_map(|ext| {
            let rel = format!("saliency/{stem}.{ext}");
            source.join(&rel).is_file().then_some(rel)
        });
        let gt_layout = match by_image.remove(&name) {
            Some(raws) => match build_gt_layout(&raws, width, height) {
                Ok(layout) => Some(layout),
                Err(message) => {
                    problems.push(ImportProblem {
                        row: raws.first().map(|r| r.row).unwrap_or(0),
                        kind: "MalformedAnnotation",
                        message,
                    });
                    None
                }
            },
            None => None,
        };
        entries.push(ManifestEntry {
            id: stem,
            image: format!("images/{name}"),
            width,
            height,
            saliency,
            gt_layout,
        });
    }

    let manifest = DatasetManifest {
        canvas: (PROMPT_CANVAS_W, PROMPT_CANVAS_H),
        entries,
        root: source.to_path_buf(),
    };
    Ok(ImportReport { manifest, problems })
}

fn parse_row(
    record: &csv::StringRecord,
    kind: DatasetKind,
) -> Result<(String, (Category, Rect)), String> {
    match kind {
        DatasetKind::Generic => {
            // image,category,x,y,w,h
            if record.len() < 6 {
                return Err(format!("expected 6 columns, got {}", record.len()));
            }
            let image = record[0].trim().to_string();
            let category: Category =
                record[1].trim().parse().map_err(|_| format!("unknown category {:?}", &record[1]))?;
            if category == Category::Canvas {
                return Err("canvas is not an annotatable category".to_string());
            }
            let nums: Result<Vec<i64>, _> =
                (2..6).map(|i| record[i].trim().parse::<i64>()).collect();
            let nums = nums.map_err(|e| format!("bad coordinate: {e}"))?;
            let rect = Rect::new(nums[0], nums[1], nums[2], nums[3])
                .map_err(|e| format!("bad box: {e}"))?;
            Ok((image, (category, rect)))
        }
        DatasetKind::PkuPosterLayout => {
            // poster_path,total_elem,cls_elem,box_elem
            if record.len() < 4 {
                return Err(format!("expected 4 columns, got {}", record.len()));
            }
            let image = Path::new(record[0].trim())
                .file_name()
                .ok_or_else(|| format!("bad poster_path {:?}", &record[0]))?
                .to_string_lossy()
                .to_string();
            let category = match record[2].trim() {
                "1" => Category::Text,
                "2" => Category::Logo,
                "3" => Category::Underlay,
                other => return Err(format!("unknown cls_elem {other:?}")),
            };
            let box_text = record[3].trim().trim_start_matches('[').trim_end_matches(']');
            let nums: Result<Vec<i64>, _> = box_text
                .split(',')
                .map(|t| t.trim().parse::<f64>().map(|v| (v + 0.5).floor() as i64))
                .collect();
            let nums = nums.map_err(|e| format!("bad box_elem {:?}: {e}", &record[3]))?;
            if nums.len() != 4 {
                return Err(format!("box_elem needs 4 values, got {}", nums.len()));
            }
            let (x1, y1, x2, y2) = (nums[0], nums[1], nums[2], nums[3]);
            let rect = Rect::new(x1, y1, x2 - x1, y2 - y1)
                .map_err(|e| format!("bad box_elem corners: {e}"))?;
            Ok((image, (category, rect)))
        }
    }
}

fn build_gt_layout(raws: &[RawElement], width: u32, height: u32) -> Result<Layout, String> {
    let canvas = Rect::new(0, 0, width as i64, height as i64).map_err(|e| e.to_string())?;
    let elements: Vec<Element> = raws
        .iter()
        .enumerate()
        .map(|(i, raw)| Element::new(raw.category, i as u32, raw.rect).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let native = Layout::new(canvas, elements).map_err(|e| e.to_string())?;
    let sx = Ratio::new(PROMPT_CANVAS_W, width as i64);
    let sy = Ratio::new(PROMPT_CANVAS_H, height as i64);
    scale_layout(&native, sx, sy).map_err(|e| e.to_string())
}
