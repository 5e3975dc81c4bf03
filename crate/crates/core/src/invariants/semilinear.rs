//! Eventually periodic subsets of the natural numbers, described as a finite
//! set plus finitely many arithmetic progressions.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A finite set union arithmetic progressions `{b, b+d, b+2d, ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SemilinearSet {
    finite_part: BTreeSet<u64>,
    progressions: BTreeSet<(u64, u64)>,
}

/// Canonical description of a semilinear set: members below `threshold` are
/// listed, and from `threshold` on membership depends only on the residue
/// modulo `period`. Period and threshold are both minimal, so equal sets have
/// equal normal forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub period: u64,
    pub threshold: u64,
    pub below: Vec<u64>,
    /// `active[r]` for r in 0..period.
    pub active: Vec<bool>,
}

/// Outcome of comparing two sets up to finite symmetric difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymDiff {
    Finite,
    /// The residue class `residue mod period` lies eventually in exactly one
    /// of the two sets; `in_first` says which.
    Infinite {
        residue: u64,
        period: u64,
        in_first: bool,
    },
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl SemilinearSet {
    pub fn new(
        finite_part: impl IntoIterator<Item = u64>,
        progressions: impl IntoIterator<Item = (u64, u64)>,
    ) -> Result<SemilinearSet> {
        let progressions: BTreeSet<(u64, u64)> = progressions.into_iter().collect();
        if let Some(&(b, _)) = progressions.iter().find(|&&(_, d)| d == 0) {
            return Err(Error::InvalidSpec(format!("progression with base {b} has period 0")));
        }
        Ok(SemilinearSet {
            finite_part: finite_part.into_iter().collect(),
            progressions,
        })
    }

    pub fn empty() -> SemilinearSet {
        SemilinearSet::default()
    }

    pub fn finite(values: impl IntoIterator<Item = u64>) -> SemilinearSet {
        SemilinearSet {
            finite_part: values.into_iter().collect(),
            progressions: BTreeSet::new(),
        }
    }

    pub fn progression(base: u64, period: u64) -> Result<SemilinearSet> {
        SemilinearSet::new([], [(base, period)])
    }

    pub fn finite_part(&self) -> &BTreeSet<u64> {
        &self.finite_part
    }

    pub fn progressions(&self) -> &BTreeSet<(u64, u64)> {
        &self.progressions
    }

    pub fn contains(&self, n: u64) -> bool {
        self.finite_part.contains(&n)
            || self.progressions.iter().any(|&(b, d)| n >= b && (n - b) % d == 0)
    }

    pub fn union(&self, other: &SemilinearSet) -> SemilinearSet {
        SemilinearSet {
            finite_part: self.finite_part.union(&other.finite_part).copied().collect(),
            progressions: self.progressions.union(&other.progressions).copied().collect(),
        }
    }

    /// Largest number mentioned in the description (bases and finite part).
    pub fn max_mentioned(&self) -> u64 {
        let a = self.finite_part.iter().next_back().copied().unwrap_or(0);
        let b = self.progressions.iter().map(|&(b, _)| b).max().unwrap_or(0);
        a.max(b)
    }

    /// lcm of all progression periods, 1 when there are none.
    pub fn raw_period(&self) -> u64 {
        self.progressions.iter().fold(1, |acc, &(_, d)| lcm(acc, d))
    }

    pub fn normal_form(&self) -> NormalForm {
        let l = self.raw_period();
        let t0 = self.max_mentioned() + l;
        let raw: Vec<bool> = (0..l).map(|r| self.contains(t0 + (r + l - t0 % l) % l)).collect();

        let period = (1..=l)
            .filter(|d| l % d == 0)
            .find(|&d| (0..l as usize).all(|r| raw[r] == raw[r % d as usize]))
            .unwrap_or(l);
        let active: Vec<bool> = raw[..period as usize].to_vec();
        let eventual = |n: u64| active[(n % period) as usize];

        let mut threshold = t0;
        while threshold > 0 && self.contains(threshold - 1) == eventual(threshold - 1) {
            threshold -= 1;
        }
        let below = (0..threshold).filter(|&n| self.contains(n)).collect();
        NormalForm {
            period,
            threshold,
            below,
            active,
        }
    }

    /// The canonical description: members below the threshold in the finite
    /// part, one progression per active residue starting at the threshold.
    pub fn normalize(&self) -> SemilinearSet {
        SemilinearSet::from_normal_form(&self.normal_form())
    }

    pub fn from_normal_form(nf: &NormalForm) -> SemilinearSet {
        let l = nf.period;
        let t = nf.threshold;
        let progressions = (0..l)
            .filter(|&r| nf.active[r as usize])
            .map(|r| (t + (r + l - t % l) % l, l))
            .collect();
        SemilinearSet {
            finite_part: nf.below.iter().copied().collect(),
            progressions,
        }
    }

    /// Set equality, decided on normal forms.
    pub fn same_set(&self, other: &SemilinearSet) -> bool {
        self.normal_form() == other.normal_form()
    }

    pub fn is_finite(&self) -> bool {
        self.progressions.is_empty() || self.normal_form().active.iter().all(|a| !a)
    }

    /// Members in increasing order, 0-based.
    pub fn nth_member(&self, k: u64) -> Option<u64> {
        self.normal_form().nth_member(k)
    }

    /// The eventually-periodic tail: members at or beyond the threshold.
    pub fn tail(&self) -> SemilinearSet {
        let nf = self.normal_form();
        let tail = NormalForm {
            below: Vec::new(),
            ..nf
        };
        SemilinearSet::from_normal_form(&tail)
    }

    /// The set with finitely many values removed.
    pub fn without(&self, values: &BTreeSet<u64>) -> SemilinearSet {
        let nf = self.normal_form();
        let threshold = values.iter().next_back().map_or(nf.threshold, |&v| nf.threshold.max(v + 1));
        let below = (0..threshold).filter(|n| self.contains(*n) && !values.contains(n)).collect();
        SemilinearSet::from_normal_form(&NormalForm {
            threshold,
            below,
            ..nf
        })
        .normalize()
    }

    /// Decides whether the symmetric difference with `other` is finite.
    pub fn symdiff_finite(&self, other: &SemilinearSet) -> SymDiff {
        let a = self.normal_form();
        let b = other.normal_form();
        let l = lcm(a.period, b.period);
        for r in 0..l {
            let x = a.active[(r % a.period) as usize];
            let y = b.active[(r % b.period) as usize];
            if x != y {
                return SymDiff::Infinite {
                    residue: r,
                    period: l,
                    in_first: x,
                };
            }
        }
        SymDiff::Finite
    }
}

impl NormalForm {
    pub fn nth_member(&self, k: u64) -> Option<u64> {
        if (k as usize) < self.below.len() {
            return Some(self.below[k as usize]);
        }
        let k = k - self.below.len() as u64;
        let l = self.period;
        let t = self.threshold;
        let mut bases: Vec<u64> = (0..l)
            .filter(|&r| self.active[r as usize])
            .map(|r| t + (r + l - t % l) % l)
            .collect();
        if bases.is_empty() {
            return None;
        }
        bases.sort_unstable();
        let c = bases.len() as u64;
        Some(bases[(k % c) as usize] + (k / c) * l)
    }
}

impl fmt::Display for SemilinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let finite: Vec<String> = self.finite_part.iter().map(u64::to_string).collect();
        let progs: Vec<String> = self.progressions.iter().map(|(b, d)| format!("({b},{d})")).collect();
        write!(f, "semilinear{{ finite = {{{}}}; prog = {} }}", finite.join(","), progs.join(";"))
    }
}

impl fmt::Display for SymDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymDiff::Finite => write!(f, "finite"),
            SymDiff::Infinite { residue, period, .. } => write!(f, "infinite {residue}/{period}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> SemilinearSet {
        SemilinearSet::progression(0, 2).unwrap()
    }

    #[test]
    fn membership() {
        assert!(!evens().contains(7));
        assert!(evens().contains(8));
    }

    #[test]
    fn two_residues_cover_everything() {
        let s = SemilinearSet::new([], [(0, 2), (1, 2)]).unwrap();
        let n = s.normalize();
        assert_eq!(n, SemilinearSet::new([], [(0, 1)]).unwrap());
        assert!(s.same_set(&SemilinearSet::progression(0, 1).unwrap()));
    }

    #[test]
    fn base_absorbs_finite_element() {
        let s = SemilinearSet::new([3], [(3, 4)]).unwrap();
        assert_eq!(s.normalize(), SemilinearSet::progression(3, 4).unwrap());
    }

    #[test]
    fn normalize_is_idempotent_and_keeps_membership() {
        let s = SemilinearSet::new([1, 5, 40], [(7, 6), (10, 4), (2, 12)]).unwrap();
        let n = s.normalize();
        assert_eq!(n.normalize(), n);
        for x in 0..300 {
            assert_eq!(s.contains(x), n.contains(x), "x = {x}");
        }
    }

    #[test]
    fn symdiff_examples() {
        let late = SemilinearSet::progression(100, 2).unwrap();
        assert_eq!(evens().symdiff_finite(&late), SymDiff::Finite);
        let odds = SemilinearSet::progression(1, 2).unwrap();
        assert_eq!(
            evens().symdiff_finite(&odds),
            SymDiff::Infinite {
                residue: 0,
                period: 2,
                in_first: true
            }
        );
        assert_eq!(odds.symdiff_finite(&odds), SymDiff::Finite);
    }

    #[test]
    fn nth_member_walks_in_order() {
        let s = SemilinearSet::new([1, 2], [(5, 3), (6, 3)]).unwrap();
        let listed: Vec<u64> = (0..20).map_while(|k| s.nth_member(k)).collect();
        let brute: Vec<u64> = (0..200).filter(|&x| s.contains(x)).take(20).collect();
        assert_eq!(listed, brute);
        assert_eq!(SemilinearSet::finite([4, 9]).nth_member(2), None);
    }

    #[test]
    fn without_removes_exactly_the_given_values() {
        let s = SemilinearSet::new([1], [(4, 3)]).unwrap();
        let t = s.without(&[1, 7, 100].into_iter().collect());
        for x in 0..200 {
            assert_eq!(t.contains(x), s.contains(x) && ![1, 7, 100].contains(&x), "x = {x}");
        }
    }

    #[test]
    fn zero_period_rejected() {
        assert!(SemilinearSet::progression(3, 0).is_err());
    }

    #[test]
    fn display_literal() {
        let s = SemilinearSet::new([1, 2], [(3, 2)]).unwrap();
        assert_eq!(s.to_string(), "semilinear{ finite = {1,2}; prog = (3,2) }");
    }
}
