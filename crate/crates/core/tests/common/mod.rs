//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use aut_core::preorder::FinitaryPartition;
use aut_core::{BaseShape, Field, IndexSet, PreorderSpec, Profile, WindowElement};
use rand::Rng;

/// Period-20 pattern: a full block of ten, then ten singletons.
pub fn q1() -> PreorderSpec {
    periodic(10)
}

/// Period-100 pattern: a full block of ten, then ninety singletons.
pub fn q2() -> PreorderSpec {
    periodic(90)
}

fn periodic(singletons: usize) -> PreorderSpec {
    let mut parts = vec![10];
    parts.extend(std::iter::repeat(1).take(singletons));
    PreorderSpec::periodic_intervals(BaseShape::Z, &parts).unwrap()
}

/// Plain Z with two merged runs, `{0,1,2}` and `{5,6}`.
pub fn coarsened() -> PreorderSpec {
    PreorderSpec::plain(BaseShape::Z)
        .coarsen(FinitaryPartition::new(vec![IndexSet::unit_range(0, 2), IndexSet::unit_range(5, 6)]))
        .unwrap()
}

/// Mixed blocks: pairs alternating with singletons.
pub fn pairs() -> PreorderSpec {
    PreorderSpec::periodic_intervals(BaseShape::Z, &[2, 1]).unwrap()
}

/// The preorders of the group-axiom matrix, labelled.
pub fn spec_matrix() -> Vec<(&'static str, Arc<PreorderSpec>)> {
    vec![
        ("Z", Arc::new(PreorderSpec::plain(BaseShape::Z))),
        ("N", Arc::new(PreorderSpec::plain(BaseShape::N))),
        ("Q1", Arc::new(q1())),
        ("coarsened", Arc::new(coarsened())),
    ]
}

pub const FIELDS: [u64; 5] = [2, 3, 4, 5, 9];

/// A random position admissible for the base shape, within `span` of 0.
pub fn random_position<R: Rng>(rng: &mut R, spec: &PreorderSpec, span: i64) -> i64 {
    match spec.base() {
        BaseShape::Z => rng.gen_range(-span..=span),
        BaseShape::N => rng.gen_range(0..=2 * span),
        BaseShape::NegN => rng.gen_range(-2 * span..=0),
    }
}

/// Hull of two nearby random indices.
pub fn random_window<R: Rng>(rng: &mut R, spec: &PreorderSpec) -> IndexSet {
    random_window_spread(rng, spec, 3)
}

/// Hull of a random index and one up to `spread - 1` positions later.
pub fn random_window_spread<R: Rng>(rng: &mut R, spec: &PreorderSpec, spread: i64) -> IndexSet {
    let a = random_position(rng, spec, 12);
    let b = a + rng.gen_range(0..spread);
    let ia = spec.index_at(a).unwrap();
    let ib = spec.index_at(b).or_else(|_| spec.index_at(a)).unwrap();
    spec.hull(&IndexSet::new([ia, ib])).unwrap()
}

pub fn random_element<R: Rng>(rng: &mut R, field: &Field, spec: &Arc<PreorderSpec>, profile: Profile) -> WindowElement {
    let w = random_window(rng, spec);
    WindowElement::random_with(rng, field.clone(), spec.clone(), &w, profile).unwrap()
}

/// The interval `[i, j]` between two random positions, a convex region.
pub fn random_interval<R: Rng>(rng: &mut R, spec: &PreorderSpec, span: i64) -> IndexSet {
    loop {
        let a = random_position(rng, spec, span);
        let b = random_position(rng, spec, span);
        let (i, j) = (spec.index_at(a.min(b)).unwrap(), spec.index_at(a.max(b)).unwrap());
        let r = spec.interval(&i, &j).unwrap();
        if !r.is_empty() {
            return r;
        }
    }
}
