//! Codec round-trip and robustness properties.

use adlayout_core::layout::{
    parse_layout_html, serialize_layout_html, Category, Element, Layout, Rect,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn category_strategy() -> impl Strategy<Value = Category> {
    prop_oneof![
        Just(Category::Logo),
        Just(Category::Text),
        Just(Category::Underlay),
    ]
}

fn layout_strategy() -> impl Strategy<Value = Layout> {
    (1i64..2000, 1i64..2000, proptest::collection::vec(
        (category_strategy(), -200i64..2000, -200i64..2000, 0i64..2000, 0i64..2000),
        0..12,
    ))
        .prop_map(|(cw, ch, elems)| {
            let elements = elems
                .into_iter()
                .enumerate()
                .map(|(i, (c, x, y, w, h))| {
                    Element::new(c, i as u32, Rect::new(x, y, w, h).unwrap()).unwrap()
                })
                .collect();
            Layout::new(Rect::new(0, 0, cw, ch).unwrap(), elements).unwrap()
        })
}

proptest! {
    #[test]
    fn parse_inverts_serialize(layout in layout_strategy()) {
        let html = serialize_layout_html(&layout);
        let parsed = parse_layout_html(&html, None).unwrap();
        prop_assert_eq!(parsed.layout, layout);
        prop_assert!(!parsed.coerced);
    }

    #[test]
    fn serialization_is_deterministic(layout in layout_strategy()) {
        prop_assert_eq!(serialize_layout_html(&layout), serialize_layout_html(&layout));
    }
}

/// Seeded random layout used by the fuzz and bulk round-trip checks.
fn random_layout(rng: &mut ChaCha8Rng) -> Layout {
    let canvas = Rect::new(0, 0, rng.gen_range(1..1200), rng.gen_range(1..1200)).unwrap();
    let n = rng.gen_range(0..10);
    let elements = (0..n)
        .map(|i| {
            let category = match rng.gen_range(0..3) {
                0 => Category::Logo,
                1 => Category::Text,
                _ => Category::Underlay,
            };
            let rect = Rect::new(
                rng.gen_range(-50..1200),
                rng.gen_range(-50..1200),
                rng.gen_range(0..600),
                rng.gen_range(0..600),
            )
            .unwrap();
            Element::new(category, i, rect).unwrap()
        })
        .collect();
    Layout::new(canvas, elements).unwrap()
}

#[test]
fn bulk_round_trip_over_random_layouts() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xad1a);
    for _ in 0..1200 {
        let layout = random_layout(&mut rng);
        let parsed = parse_layout_html(&serialize_layout_html(&layout), None)
            .expect("canonical form must parse");
        assert_eq!(parsed.layout, layout);
    }
}

/// The parser must reject garbage with typed errors, never panic.
#[test]
fn fuzzed_mutations_never_panic() {
    const TABLE_DOC: &str = "<html>\n<body>\n<div  class=\"canvas\" style=\"left:0px; top:0px; width:102px; height:150px\"></div>\n<div  class=\"text\" style=\"left:2px; top:113px; width:95px; height:10px\"></div>\n<div  class=\"text\" style=\"left:2px; top:124px; width:95px; height:9px\"></div>\n<div  class=\"underlay\" style=\"left:0px; top:111px; width:102px; height:24px\"></div>\n</body>\n</html>";
    let mut rng = ChaCha8Rng::seed_from_u64(0xf22d);
    let expected = Rect::new(0, 0, 102, 150).unwrap();
    for _ in 0..4000 {
        let mut bytes = TABLE_DOC.as_bytes().to_vec();
        for _ in 0..rng.gen_range(1..20) {
            match rng.gen_range(0..3) {
                0 => {
                    let i = rng.gen_range(0..bytes.len());
                    bytes[i] = rng.gen_range(0x20..0x7f);
                }
                1 => {
                    let i = rng.gen_range(0..bytes.len());
                    bytes.remove(i);
                }
                _ => {
                    let i = rng.gen_range(0..=bytes.len());
                    bytes.insert(i, rng.gen_range(0x20..0x7f));
                }
            }
        }
        let text = String::from_utf8_lossy(&bytes);
        // Any Result is fine; a panic fails the test.
        let _ = parse_layout_html(&text, Some(expected));
        let _ = adlayout_core::layout::extract_html_block(&text);
        let _ = adlayout_core::layout::salvage_layout_html(&text, Some(expected));
    }
}
