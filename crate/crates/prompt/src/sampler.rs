use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use adlayout_core::layout::{Category, ElementConstraint};

use super::PlanError;

/// Draw one training annotation uniformly (seeded, reproducible) and turn
/// its category multiset into a constraint with indices renumbered 0..N-1
/// in canonical logo < text < underlay order.
pub fn sample_constraint(
    annotations: &[Vec<Category>],
    seed: u64,
) -> Result<ElementConstraint, PlanError> {
    if annotations.is_empty() {
        return Err(PlanError::EmptyAnnotationSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = rng.gen_range(0..annotations.len());
    ElementConstraint::from_categories(&annotations[pick])
        .map_err(|e| PlanError::Constraint(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_set_is_deterministic() {
        let annotations = vec![vec![Category::Text, Category::Text, Category::Underlay]];
        let c = sample_constraint(&annotations, 42).unwrap();
        assert_eq!(c.to_string(), "text 0 | text 1 | underlay 2");
        assert_eq!(sample_constraint(&annotations, 42).unwrap(), c);
    }

    #[test]
    fn draws_are_members_of_the_annotation_set() {
        let annotations = vec![
            vec![Category::Text],
            vec![Category::Logo, Category::Text],
            vec![Category::Text, Category::Underlay],
        ];
        let expected: Vec<String> = annotations
            .iter()
            .map(|a| ElementConstraint::from_categories(a).unwrap().to_string())
            .collect();
        for seed in 0..1000 {
            let c = sample_constraint(&annotations, seed).unwrap().to_string();
            assert!(expected.contains(&c), "draw {c} not in the set");
        }
    }

    #[test]
    fn empty_set_errors() {
        assert_eq!(sample_constraint(&[], 1), Err(PlanError::EmptyAnnotationSet));
    }
}
