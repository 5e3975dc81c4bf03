//! The block-size invariant of a preorder and the necessary condition for
//! local isomorphism it yields.

pub mod semilinear;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::preorder::PreorderSpec;
use semilinear::{SemilinearSet, SymDiff};

/// Class sizes of a preorder: all that occur, and those occurring
/// infinitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharpInvariant {
    pub sizes: SemilinearSet,
    pub recurring: SemilinearSet,
}

impl fmt::Display for SharpInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sizes = {}\nrecurring = {}", self.sizes.normalize(), self.recurring.normalize())
    }
}

/// Outcome of the local-isomorphism comparator. `Passes` only means the
/// necessary condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Passes,
    Fails { residue: u64, period: u64 },
}

impl Verdict {
    pub fn passes(&self) -> bool {
        matches!(self, Verdict::Passes)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Passes => write!(f, "verdict=passes witness=none"),
            Verdict::Fails { residue, period } => write!(f, "verdict=fails witness={residue}/{period}"),
        }
    }
}

/// Computes the invariant.
///
/// Periodic pattern blocks recur, exceptions and coarsened classes add
/// finitely many sizes. With a size enumeration every member occurs once,
/// singleton blocks recur, and the eventually periodic tail of the set is
/// reported as recurring.
pub fn sharp_of(preorder: &PreorderSpec) -> Result<SharpInvariant> {
    let core = preorder.core_range();
    let in_core = |c: i64| core.is_some_and(|(lo, hi)| lo <= c && c <= hi);
    let mut extra = BTreeSet::new();
    for (&c, blk) in preorder.exceptions() {
        if !in_core(c) {
            extra.extend(blk.class_sizes().into_iter().map(u64::from));
        }
    }
    if let Some((lo, hi)) = core {
        let members = preorder.indices_in_blocks(lo, hi).into_iter().collect();
        extra.extend(preorder.classes_in(&members).iter().map(|c| c.len() as u64));
    }

    let (sizes, recurring) = if let Some(set) = preorder.sizes() {
        // The k-th member sits at coordinate 2k (and -2k for base Z); drop
        // the members all of whose blocks are overridden.
        let covered = |c: i64| in_core(c) || preorder.exceptions().contains_key(&c);
        let reach = core
            .map(|(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs()))
            .into_iter()
            .chain(preorder.exceptions().keys().map(|c| c.unsigned_abs()))
            .max()
            .unwrap_or(0);
        let mut hidden = BTreeSet::new();
        let mut k = 0u64;
        while 2 * k <= reach {
            let Some(size) = set.nth_member(k) else { break };
            let c = 2 * k as i64;
            let mut coords = vec![];
            if preorder.base().allows(c) {
                coords.push(c);
            }
            if preorder.base().allows(-c) {
                coords.push(-c);
            }
            if coords.iter().all(|&c| covered(c)) {
                hidden.insert(size);
            }
            k += 1;
        }
        let one = SemilinearSet::finite([1]);
        (set.without(&hidden).union(&one), set.tail().union(&one))
    } else {
        let pattern: BTreeSet<u64> =
            preorder.pattern().iter().flat_map(|b| b.class_sizes()).map(u64::from).collect();
        let recurring = SemilinearSet::finite(pattern.iter().copied());
        (recurring.clone(), recurring)
    };
    Ok(SharpInvariant {
        sizes: sizes.union(&SemilinearSet::finite(extra)).normalize(),
        recurring: recurring.normalize(),
    })
}

/// Whether the upper group of the preorder maps continuously onto
/// `PGL_n(F_q)`: exactly when `n` is a class size. Requires `n > 1`, and
/// `n > 2` when `q = 3`.
pub fn pgl_quotient_exists(preorder: &PreorderSpec, n: u64, q: u32) -> Result<bool> {
    if n <= 1 || (q == 3 && n <= 2) {
        return Err(Error::HypothesisViolated(format!("PGL quotient needs n > 1, and n > 2 over GF(3); got n = {n}, q = {q}")));
    }
    Ok(sharp_of(preorder)?.sizes.contains(n))
}

/// Finite symmetric difference of the size sets is necessary for local
/// isomorphism; a failure carries a residue class in exactly one set.
pub fn locally_isomorphic_necessary(a: &PreorderSpec, b: &PreorderSpec) -> Result<Verdict> {
    let sa = sharp_of(a)?;
    let sb = sharp_of(b)?;
    Ok(match sa.sizes.symdiff_finite(&sb.sizes) {
        SymDiff::Finite => Verdict::Passes,
        SymDiff::Infinite { residue, period, .. } => Verdict::Fails { residue, period },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preorder::{BaseShape, BlockSpec, FinitaryPartition, IndexSet};

    fn q_pattern(singletons: usize) -> PreorderSpec {
        let mut parts = vec![10];
        parts.extend(std::iter::repeat(1).take(singletons));
        PreorderSpec::periodic_intervals(BaseShape::Z, &parts).unwrap()
    }

    #[test]
    fn periodic_examples() {
        let want = SemilinearSet::finite([1, 10]);
        for p in [q_pattern(10), q_pattern(90)] {
            let s = sharp_of(&p).unwrap();
            assert!(s.sizes.same_set(&want));
            assert!(s.recurring.same_set(&want));
        }
        let z = PreorderSpec::plain(BaseShape::Z);
        assert!(sharp_of(&z).unwrap().sizes.same_set(&SemilinearSet::finite([1])));
    }

    #[test]
    fn pgl_queries() {
        let q1 = q_pattern(10);
        assert_eq!(pgl_quotient_exists(&q1, 10, 2), Ok(true));
        assert_eq!(pgl_quotient_exists(&q1, 7, 2), Ok(false));
        let z = PreorderSpec::plain(BaseShape::Z);
        assert_eq!(pgl_quotient_exists(&z, 2, 5), Ok(false));
        assert!(matches!(pgl_quotient_exists(&z, 2, 3), Err(Error::HypothesisViolated(_))));
        assert!(matches!(pgl_quotient_exists(&z, 1, 5), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn comparator_examples() {
        assert_eq!(locally_isomorphic_necessary(&q_pattern(10), &q_pattern(90)), Ok(Verdict::Passes));
        let z = PreorderSpec::plain(BaseShape::Z);
        let odd = PreorderSpec::from_sizes(BaseShape::Z, SemilinearSet::new([1], [(3, 2)]).unwrap()).unwrap();
        assert_eq!(locally_isomorphic_necessary(&z, &odd), Ok(Verdict::Fails { residue: 1, period: 2 }));
        assert_eq!(locally_isomorphic_necessary(&odd, &odd), Ok(Verdict::Passes));
    }

    #[test]
    fn exceptions_and_coarsenings_add_finitely_many_sizes() {
        let base = q_pattern(10);
        let with_exc = base.clone().with_exception(3, BlockSpec::full(4)).unwrap();
        let s = sharp_of(&with_exc).unwrap();
        assert!(s.sizes.same_set(&SemilinearSet::finite([1, 4, 10])));
        assert!(s.recurring.same_set(&sharp_of(&base).unwrap().recurring));
        let z = PreorderSpec::plain(BaseShape::Z);
        let c = z.coarsen(FinitaryPartition::single(IndexSet::unit_range(0, 2))).unwrap();
        assert!(sharp_of(&c).unwrap().sizes.same_set(&SemilinearSet::finite([1, 3])));
    }

    #[test]
    fn enumeration_members_hidden_by_coarsening_are_dropped() {
        let p = PreorderSpec::from_sizes(BaseShape::N, SemilinearSet::finite([2, 5])).unwrap();
        let s = sharp_of(&p).unwrap();
        assert!(s.sizes.same_set(&SemilinearSet::finite([1, 2, 5])));
        // Merge block 0 (size 2) with the singleton block 1.
        let part = p.indices_in_blocks(0, 1).into_iter().collect();
        let c = p.coarsen(FinitaryPartition::single(part)).unwrap();
        assert!(sharp_of(&c).unwrap().sizes.same_set(&SemilinearSet::finite([1, 3, 5])));
    }
}
