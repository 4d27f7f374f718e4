use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use adlayout_core::layout::{ElementConstraint, Layout};
use adlayout_core::metrics::check_violations;

use super::plan::{parse_plan, PlacementPlan};
use super::PromptError;

/// One few-shot example: image, requested elements, hand-written plan,
/// and the layout the plan describes.
#[derive(Debug, Clone)]
pub struct Exemplar {
    pub id: String,
    pub image: PathBuf,
    pub constraint: ElementConstraint,
    pub plan: PlacementPlan,
    pub layout: Layout,
}

#[derive(Deserialize)]
struct ManifestFile {
    exemplars: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
struct ManifestEntry {
    id: String,
    image: String,
    constraint: ElementConstraint,
    plan: String,
    layout: Layout,
}

/// Immutable exemplar collection loaded from a directory with a
/// `manifest.json`. Loading validates every exemplar: the plan must parse
/// against the constraint, the layout must satisfy the constraint checker,
/// and the image file must exist.
#[derive(Debug)]
pub struct ExemplarStore {
    exemplars: Vec<Exemplar>,
}

impl ExemplarStore {
    pub fn load(dir: &Path) -> Result<Self, PromptError> {
        let manifest_path = dir.join("manifest.json");
        let raw = std::fs::read_to_string(&manifest_path)?;
        let manifest: ManifestFile = serde_json::from_str(&raw)?;
        let mut exemplars = Vec::with_capacity(manifest.exemplars.len());
        for entry in manifest.exemplars {
            let image = dir.join(&entry.image);
            if !image.is_file() {
                return Err(PromptError::InvalidExemplar {
                    id: entry.id,
                    reason: format!("image {} does not exist", image.display()),
                });
            }
            let plan = parse_plan(&entry.plan, &entry.constraint).map_err(|e| {
                PromptError::InvalidExemplar {
                    id: entry.id.clone(),
                    reason: format!("plan does not parse against its constraint: {e}"),
                }
            })?;
            let violations = check_violations(&entry.layout, &entry.constraint);
            if violations.has_violation {
                return Err(PromptError::InvalidExemplar {
                    id: entry.id,
                    reason: format!(
                        "layout violates its constraint (mismatch: {}, orphan underlays: {:?})",
                        violations.constraint_mismatch, violations.orphan_underlays
                    ),
                });
            }
            exemplars.push(Exemplar {
                id: entry.id,
                image,
                constraint: entry.constraint,
                plan,
                layout: entry.layout,
            });
        }
        Ok(Self { exemplars })
    }

    pub fn len(&self) -> usize {
        self.exemplars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exemplars.is_empty()
    }

    pub fn exemplars(&self) -> &[Exemplar] {
        &self.exemplars
    }

    /// The first `shots` exemplars in store order, or a seeded shuffle of
    /// the whole store when `shuffle_seed` is given.
    pub fn take(
        &self,
        shots: usize,
        shuffle_seed: Option<u64>,
    ) -> Result<Vec<&Exemplar>, PromptError> {
        if shots > self.exemplars.len() {
            return Err(PromptError::NotEnoughExemplars { have: self.exemplars.len(), want: shots });
        }
        let mut refs: Vec<&Exemplar> = self.exemplars.iter().collect();
        if let Some(seed) = shuffle_seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            refs.shuffle(&mut rng);
        }
        refs.truncate(shots);
        Ok(refs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_store(dir: &Path, manifest: &str) {
        std::fs::write(dir.join("manifest.json"), manifest).unwrap();
        std::fs::create_dir_all(dir.join("images")).unwrap();
        // Content is irrelevant for store loading; only existence matters.
        std::fs::write(dir.join("images/ex01.png"), b"png").unwrap();
    }

    const GOOD: &str = r#"{
  "exemplars": [
    {
      "id": "ex01",
      "image": "images/ex01.png",
      "constraint": "text 0 | underlay 1",
      "plan": "- Text 0 : Bottom center.\n- Underlay 1 : Behind text 0.",
      "layout": {
        "canvas": {"x": 0, "y": 0, "w": 102, "h": 150},
        "elements": [
          {"category": "text", "index": 0, "x": 10, "y": 120, "w": 80, "h": 10},
          {"category": "underlay", "index": 1, "x": 5, "y": 115, "w": 92, "h": 20}
        ]
      }
    }
  ]
}"#;

    #[test]
    fn loads_valid_store() {
        let dir = tempfile::tempdir().unwrap();
        write_store(dir.path(), GOOD);
        let store = ExemplarStore::load(dir.path()).unwrap();
        assert_eq!(store.len(), 1);
        let ex = &store.exemplars()[0];
        assert_eq!(ex.plan.directives().len(), 2);
        assert_eq!(store.take(1, None).unwrap()[0].id, "ex01");
        assert!(store.take(2, None).is_err());
    }

    #[test]
    fn rejects_layout_that_violates_its_constraint() {
        let dir = tempfile::tempdir().unwrap();
        // Underlay moved away from the text: orphan underlay.
        let bad = GOOD.replace("\"y\": 115", "\"y\": 20");
        write_store(dir.path(), &bad);
        let err = ExemplarStore::load(dir.path()).unwrap_err();
        assert!(matches!(err, PromptError::InvalidExemplar { .. }), "got {err:?}");
    }

    #[test]
    fn rejects_plan_that_misses_elements() {
        let dir = tempfile::tempdir().unwrap();
        let bad = GOOD.replace("\\n- Underlay 1 : Behind text 0.", "");
        write_store(dir.path(), &bad);
        assert!(matches!(
            ExemplarStore::load(dir.path()),
            Err(PromptError::InvalidExemplar { .. })
        ));
    }

    #[test]
    fn shuffle_is_seeded_and_stable() {
        let dir = tempfile::tempdir().unwrap();
        // Clone the single exemplar into several ids.
        let mut entries = Vec::new();
        for i in 0..6 {
            entries.push(
                GOOD.replace("ex01\",", &format!("ex{i:02}\","))
                    .trim_start_matches("{\n  \"exemplars\": [\n")
                    .trim_end_matches("\n  ]\n}")
                    .to_string(),
            );
        }
        let manifest = format!("{{\n  \"exemplars\": [\n{}\n  ]\n}}", entries.join(",\n"));
        write_store(dir.path(), &manifest);
        let store = ExemplarStore::load(dir.path()).unwrap();
        assert_eq!(store.len(), 6);
        let a: Vec<String> = store.take(6, Some(9)).unwrap().iter().map(|e| e.id.clone()).collect();
        let b: Vec<String> = store.take(6, Some(9)).unwrap().iter().map(|e| e.id.clone()).collect();
        assert_eq!(a, b);
        let in_order: Vec<String> = store.take(6, None).unwrap().iter().map(|e| e.id.clone()).collect();
        assert_eq!(in_order, vec!["ex00", "ex01", "ex02", "ex03", "ex04", "ex05"]);
    }
}
