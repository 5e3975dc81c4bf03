mod common;

use aut_core::{BaseShape, BlockSpec, FinitaryPartition, IndexSet, PreorderSpec};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn specs() -> Vec<PreorderSpec> {
    let mut v: Vec<PreorderSpec> = spec_matrix().into_iter().map(|(_, s)| (*s).clone()).collect();
    v.push(pairs());
    v.push(PreorderSpec::from_pattern(BaseShape::Z, vec![BlockSpec::antichain(3), BlockSpec::chain(2)]).unwrap());
    v.push(PreorderSpec::plain(BaseShape::NegN));
    v
}

fn spec_and_rng() -> impl Strategy<Value = (PreorderSpec, ChaCha8Rng)> {
    (0..specs().len(), any::<u64>()).prop_map(|(k, seed)| (specs().swap_remove(k), ChaCha8Rng::seed_from_u64(seed)))
}

fn random_index<R: Rng>(rng: &mut R, spec: &PreorderSpec) -> aut_core::Index {
    spec.index_at(random_position(rng, spec, 15)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leq_is_reflexive_and_transitive((spec, mut rng) in spec_and_rng()) {
        for _ in 0..50 {
            let (i, j, k) = (random_index(&mut rng, &spec), random_index(&mut rng, &spec), random_index(&mut rng, &spec));
            prop_assert!(spec.leq(&i, &i).unwrap());
            if spec.leq(&i, &j).unwrap() && spec.leq(&j, &k).unwrap() {
                prop_assert!(spec.leq(&i, &k).unwrap());
            }
        }
    }

    #[test]
    fn hull_is_the_least_strongly_convex_superset((spec, mut rng) in spec_and_rng()) {
        let s: IndexSet = (0..rng.gen_range(1..4)).map(|_| random_index(&mut rng, &spec)).collect();
        let h = spec.hull(&s).unwrap();
        prop_assert!(s.is_subset(&h));
        prop_assert!(spec.is_strongly_convex(&h));
        let classes = spec.classes_in(&h);
        let below = |a: &IndexSet, b: &IndexSet| a.iter().all(|x| b.iter().all(|y| spec.lt(x, y)));
        for c in &classes {
            let boundary = !classes.iter().any(|d| below(d, c)) || !classes.iter().any(|d| below(c, d));
            if boundary && c.intersection(&s).is_empty() {
                prop_assert!(!spec.is_strongly_convex(&h.difference(c)), "dropping {} from {} stays strongly convex", c, h);
            }
        }
    }

    #[test]
    fn strongly_convex_sets_intersect_to_strongly_convex((spec, mut rng) in spec_and_rng()) {
        let pair = |rng: &mut ChaCha8Rng| {
            let s: IndexSet = [random_index(rng, &spec), random_index(rng, &spec)].into_iter().collect();
            spec.hull(&s).unwrap()
        };
        let (a, b) = (pair(&mut rng), pair(&mut rng));
        let meet = a.intersection(&b);
        if !meet.is_empty() {
            prop_assert!(spec.is_strongly_convex(&meet));
        }
    }

    #[test]
    fn intervals_lie_in_hulls((spec, mut rng) in spec_and_rng()) {
        let (i, j) = (random_index(&mut rng, &spec), random_index(&mut rng, &spec));
        let iv = spec.interval(&i, &j).unwrap();
        let h = spec.hull(&IndexSet::new([i, j])).unwrap();
        prop_assert!(iv.is_subset(&h));
        prop_assert!(spec.is_convex(&iv));
    }

    /// Coarsening by strongly convex parts adds exactly the part
    /// equivalences to the base relation.
    #[test]
    fn coarsening_by_strongly_convex_parts(start in -6i64..6, len_a in 0i64..3, gap in 1i64..3, len_b in 0i64..3) {
        let base = pairs();
        let a = IndexSet::new(base.indices_in_blocks(start, start + len_a));
        let b_lo = start + len_a + gap;
        let b = IndexSet::new(base.indices_in_blocks(b_lo, b_lo + len_b));
        let parts: Vec<IndexSet> = [a, b].into_iter().filter(|p| p.len() >= 2).collect();
        prop_assume!(!parts.is_empty());
        for p in &parts {
            prop_assert!(base.is_strongly_convex(p));
        }
        let coarse = base.coarsen(FinitaryPartition::new(parts.clone())).unwrap();
        let region = base.indices_in_blocks(start - 2, b_lo + len_b + 2);
        let same_part = |i, j| parts.iter().any(|p| p.contains(i) && p.contains(j));
        for i in &region {
            for j in &region {
                prop_assert_eq!(coarse.leq(i, j).unwrap(), base.leq(i, j).unwrap() || same_part(i, j));
            }
        }
    }
}
