//! Randomized invariants across the crate.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};
use proptest::collection::vec;
use proptest::prelude::*;

use stochom::complex::{
    configuration_probability, realize, Cell, Configuration, RandomComplex, Rat,
    SimplicialComplex,
};
use stochom::format::{parse_complex, parse_rational, serialize_complex};
use stochom::oracle::expected_euler_exact;
use stochom::pattern::{canonical_form, Pattern};
use stochom::poly::UniPoly;
use stochom::reduction::{c_direct, erase_cycle_rule, reduce_pattern};

/// Edge list over at most 6 vertices, 1 to 7 edges, duplicates collapsed.
fn edge_pattern() -> impl Strategy<Value = Pattern> {
    vec((1u32..=6, 1u32..=6), 1..=7)
        .prop_filter_map("needs a real edge", |pairs| {
            let edges: Vec<(u32, u32)> = pairs
                .into_iter()
                .filter(|(a, b)| a != b)
                .collect();
            if edges.is_empty() {
                None
            } else {
                Some(Pattern::from_edges(&edges))
            }
        })
}

fn small_random_complex() -> impl Strategy<Value = RandomComplex> {
    (
        vec((1u32..=4, 1u32..=4), 0..=5),
        vec((0i64..=4, 1i64..=4), 10),
    )
        .prop_map(|(pairs, fracs)| {
            let mut cells: BTreeSet<Cell> = (1..=4).map(|v| Cell::of(&[v])).collect();
            for (a, b) in pairs {
                if a != b {
                    cells.insert(Cell::of(&[a, b]));
                }
            }
            let complex = SimplicialComplex::new(cells).unwrap();
            let prob: BTreeMap<Cell, Rat> = complex
                .cells()
                .zip(fracs.iter().cycle())
                .map(|(c, &(num, den))| {
                    (c.clone(), Rat::new(num.min(den).into(), den.into()))
                })
                .collect();
            RandomComplex::new(complex, prob).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_relabeling_invariant(
        p in edge_pattern(),
        perm_seed in 0u64..1000,
    ) {
        let verts: Vec<u32> = p.vertex_set().into_iter().collect();
        // derive a permutation of the vertex labels from the seed
        let mut target: Vec<u32> = (101..101 + verts.len() as u32).collect();
        let mut s = perm_seed;
        for i in (1..target.len()).rev() {
            target.swap(i, (s % (i as u64 + 1)) as usize);
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        }
        let map: BTreeMap<u32, u32> = verts.into_iter().zip(target).collect();
        let relabeled = p.relabel(&map);
        prop_assert_eq!(
            canonical_form(&p).unwrap(),
            canonical_form(&relabeled).unwrap()
        );
    }

    #[test]
    fn configuration_probabilities_partition_unity(rc in small_random_complex()) {
        let n = rc.len();
        prop_assume!(n <= 10);
        let total: Rat = (0u64..1 << n)
            .map(|mask| configuration_probability(&rc, &Configuration::from_mask(&rc, mask)))
            .sum();
        prop_assert_eq!(total, Rat::one());
    }

    #[test]
    fn realizations_are_face_closed(rc in small_random_complex(), mask in 0u64..1024) {
        let n = rc.len();
        let cfg = Configuration::from_mask(&rc, mask & ((1 << n) - 1));
        prop_assert!(realize(&rc, &cfg).is_face_closed());
    }

    #[test]
    fn serialize_parse_roundtrip(rc in small_random_complex()) {
        let text = serialize_complex(&rc);
        prop_assert_eq!(parse_complex(&text).unwrap(), rc);
    }

    #[test]
    fn euler_closed_form_is_linear_in_gluing(rc in small_random_complex()) {
        // splitting the cell set arbitrarily and re-adding must be exact
        let chi = expected_euler_exact(&rc);
        let mut acc = Rat::zero();
        for cell in rc.complex().cells() {
            let single = rc.closure_probability(cell);
            if cell.dimension() % 2 == 0 { acc += single } else { acc -= single }
        }
        prop_assert_eq!(chi, acc);
    }

    #[test]
    fn reduced_form_preserves_coefficient(p in edge_pattern()) {
        let reduced = reduce_pattern(&p, 1);
        prop_assert_eq!(
            c_direct(&reduced, 1).unwrap(),
            c_direct(&p, 1).unwrap()
        );
    }

    #[test]
    fn erase_cycle_negates_coefficient(p in edge_pattern()) {
        if let Some((erased, sign)) = erase_cycle_rule(&p, 1).unwrap() {
            prop_assert_eq!(
                sign * c_direct(&erased, 1).unwrap(),
                c_direct(&p, 1).unwrap()
            );
        }
    }

    #[test]
    fn rational_decimal_and_fraction_agree(num in 0u32..1000u32) {
        let decimal = format!("0.{num:03}");
        let fraction = format!("{num}/1000");
        prop_assert_eq!(
            parse_rational(&decimal, 1).unwrap(),
            parse_rational(&fraction, 1).unwrap()
        );
    }

    #[test]
    fn horner_matches_naive_evaluation(
        coeffs in vec((0usize..9, -50i64..50), 0..6),
        num in -6i64..=6,
    ) {
        let mut merged: BTreeMap<usize, i64> = BTreeMap::new();
        for (d, c) in coeffs {
            *merged.entry(d).or_insert(0) += c;
        }
        let poly = UniPoly::from_coeffs(merged.clone());
        let x = Rat::new(num.into(), 3.into());
        let naive: Rat = merged
            .iter()
            .map(|(&d, &c)| {
                let mut term = Rat::from_integer(c.into());
                for _ in 0..d {
                    term *= &x;
                }
                term
            })
            .sum();
        prop_assert_eq!(poly.eval_rat(&x), naive);
    }
}
