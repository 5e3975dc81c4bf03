use std::collections::BTreeSet;

use aut_core::{
    locally_isomorphic_necessary, pgl_quotient_exists, sharp_of, BaseShape, BlockSpec, FinitaryPartition, IndexSet,
    PreorderSpec, SemilinearSet, SymDiff,
};
use proptest::prelude::*;

fn semilinear() -> impl Strategy<Value = SemilinearSet> {
    (
        prop::collection::btree_set(0u64..25, 0..5),
        prop::collection::vec((0u64..25, 1u64..8), 0..3),
    )
        .prop_map(|(finite, progs)| SemilinearSet::new(finite, progs).unwrap())
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// Patterns of interval blocks with sizes in 1..6.
fn pattern() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..6, 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The decision agrees with characteristic vectors on
    /// `[0, 4L + max]`, whose upper half covers two common periods past
    /// every base.
    #[test]
    fn symdiff_matches_characteristic_vectors(a in semilinear(), b in semilinear()) {
        let l = lcm(a.raw_period(), b.raw_period());
        let m = a.max_mentioned().max(b.max_mentioned());
        let differs: Vec<u64> = (2 * l + m..=4 * l + m).filter(|&n| a.contains(n) != b.contains(n)).collect();
        match a.symdiff_finite(&b) {
            SymDiff::Finite => prop_assert!(differs.is_empty()),
            SymDiff::Infinite { residue, period, in_first } => {
                prop_assert!(!differs.is_empty());
                let n = (2 * l + m) / period * period + period + residue;
                prop_assert_eq!(a.contains(n), in_first);
                prop_assert_ne!(a.contains(n), b.contains(n));
            }
        }
    }

    #[test]
    fn normal_forms_decide_equality(a in semilinear(), b in semilinear()) {
        let top = 2 * lcm(a.raw_period(), b.raw_period()) + a.max_mentioned().max(b.max_mentioned());
        let same = (0..=top).all(|n| a.contains(n) == b.contains(n));
        prop_assert_eq!(a.normal_form() == b.normal_form(), same);
        prop_assert!(SemilinearSet::from_normal_form(&a.normal_form()).same_set(&a));
    }

    /// Finitely many exceptional blocks leave the recurring sizes alone,
    /// change the size set by finitely much, and so never move the verdict.
    #[test]
    fn exceptions_do_not_change_the_verdict(parts in pattern(), exc in prop::collection::btree_map(-20i64..20, 1u32..9, 0..4)) {
        let base = PreorderSpec::periodic_intervals(BaseShape::Z, &parts).unwrap();
        let mut spec = base.clone();
        for (&block, &size) in &exc {
            spec = spec.with_exception(block, BlockSpec::full(size)).unwrap();
        }
        let (s0, s1) = (sharp_of(&base).unwrap(), sharp_of(&spec).unwrap());
        prop_assert!(s0.recurring.same_set(&s1.recurring));
        prop_assert_eq!(s0.sizes.symdiff_finite(&s1.sizes), SymDiff::Finite);
        prop_assert!(locally_isomorphic_necessary(&base, &spec).unwrap().passes());
    }

    /// Merging a run of `n` singletons into one block makes `n` a size.
    #[test]
    fn merging_singletons_creates_a_size(parts in pattern(), n in 3u64..9) {
        let present: BTreeSet<u64> = parts.iter().map(|&p| p as u64).chain([1]).collect();
        prop_assume!(!present.contains(&n));
        let mut before = parts.clone();
        before.extend(std::iter::repeat(1).take(n as usize));
        let mut after = parts.clone();
        after.push(n as u32);
        for q in [2, 3, 4] {
            let b = PreorderSpec::periodic_intervals(BaseShape::Z, &before).unwrap();
            prop_assert!(!pgl_quotient_exists(&b, n, q).unwrap());
            let a = PreorderSpec::periodic_intervals(BaseShape::Z, &after).unwrap();
            prop_assert!(pgl_quotient_exists(&a, n, q).unwrap());
            // A single finitary merge adds the size as well.
            let start = parts.len() as i64;
            let run = IndexSet::new(b.indices_in_blocks(start, start + n as i64 - 1));
            let c = b.coarsen(FinitaryPartition::single(run)).unwrap();
            prop_assert!(pgl_quotient_exists(&c, n, q).unwrap());
        }
    }
}
