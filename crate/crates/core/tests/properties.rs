use num_bigint::BigUint;
use proptest::prelude::*;

use tilework::compiler::lift_4d;
use tilework::formula::{emit_formula, parse_formula, Formula1in3};
use tilework::harness::builtin_tilesets;
use tilework::lattice::{builtin_tileset, emit_region, parse_region, symmetry_images, Cell, Region, Symmetry};
use tilework::solver::{count_tilings, enumerate_tilings, exists_tiling, is_valid_tiling, oracle_count};

fn region_2d(max: usize) -> impl Strategy<Value = Region> {
    proptest::collection::btree_set((0..4i32, 0..4i32), 0..=max)
        .prop_map(|s| Region::from_cells(2, s.into_iter().map(|(x, y)| Cell::xy(x, y))).unwrap())
}

fn region_3d(max: usize) -> impl Strategy<Value = Region> {
    proptest::collection::btree_set((0..3i32, 0..3i32, 0..2i32), 0..=max)
        .prop_map(|s| Region::from_cells(3, s.into_iter().map(|(x, y, z)| Cell::xyz(x, y, z))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_matches_oracle_2d(r in region_2d(14)) {
        for tiles in builtin_tilesets(2) {
            prop_assert_eq!(count_tilings(&r, &tiles).unwrap(), oracle_count(&r, &tiles).unwrap());
        }
    }

    #[test]
    fn count_matches_oracle_3d(r in region_3d(14)) {
        for tiles in builtin_tilesets(3) {
            prop_assert_eq!(count_tilings(&r, &tiles).unwrap(), oracle_count(&r, &tiles).unwrap());
        }
    }

    #[test]
    fn existence_count_and_enumeration_agree(r in region_2d(12)) {
        for tiles in builtin_tilesets(2) {
            let n = count_tilings(&r, &tiles).unwrap();
            let e = exists_tiling(&r, &tiles).unwrap();
            let first = enumerate_tilings(&r, &tiles, 1).unwrap();
            prop_assert_eq!(e, n > BigUint::from(0u32));
            prop_assert_eq!(e, !first.tilings.is_empty());
        }
    }

    #[test]
    fn enumerated_tilings_are_valid_and_complete(r in region_2d(12)) {
        let tiles = builtin_tileset("domino2").unwrap();
        let en = enumerate_tilings(&r, &tiles, 10_000).unwrap();
        prop_assert!(!en.truncated);
        for t in &en.tilings {
            prop_assert!(is_valid_tiling(&r, &tiles, t));
        }
        let mut distinct = en.tilings.clone();
        distinct.dedup();
        prop_assert_eq!(distinct.len(), en.tilings.len());
        prop_assert_eq!(BigUint::from(en.tilings.len()), count_tilings(&r, &tiles).unwrap());
    }

    #[test]
    fn counts_ignore_translation_and_symmetry(r in region_2d(12), dx in -5i32..5, dy in -5i32..5) {
        let tiles = builtin_tileset("right_tromino,square_tetromino").unwrap();
        let n = count_tilings(&r, &tiles).unwrap();
        prop_assert_eq!(count_tilings(&r.translate(Cell::xy(dx, dy)), &tiles).unwrap(), n.clone());
        for image in symmetry_images(&r, Symmetry::Rotations) {
            prop_assert_eq!(count_tilings(&image, &tiles).unwrap(), n.clone());
        }
    }

    #[test]
    fn lift_preserves_counts(r in region_3d(10)) {
        let t3 = builtin_tileset("domino3,straight_tromino3").unwrap();
        let t4 = builtin_tileset("domino4,straight_tromino4").unwrap();
        let lifted = lift_4d(&r).unwrap();
        prop_assert_eq!(count_tilings(&lifted, &t4).unwrap(), oracle_count(&r, &t3).unwrap());
    }

    #[test]
    fn region_text_round_trips(r in region_3d(18)) {
        let text = emit_region(&r);
        let back = parse_region(&text).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(emit_region(&back), text);
    }

    #[test]
    fn formula_text_round_trips(
        raw in proptest::collection::vec(proptest::sample::subsequence((1..=7usize).collect::<Vec<_>>(), 3), 0..6)
    ) {
        let f = Formula1in3::new(7, raw.iter().map(|c| [c[0], c[1], c[2]]).collect()).unwrap();
        let text = emit_formula(&f);
        let back = parse_formula(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(emit_formula(&back), text);
    }
}
