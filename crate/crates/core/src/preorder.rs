//! Z-like preordered index sets built from a sequence of finite preordered
//! blocks, optionally coarsened by finitary partitions.
//!
//! Indices are pairs `(block, slot)`. Two indices in different blocks compare
//! by block coordinate; inside a block the block's own relation decides.
//! Coarsenings glue finitely many convex parts into equivalence classes. All
//! parts live in a finite range of blocks (the *core*), on which the generated
//! preorder is precomputed by transitive closure. Outside the core, and
//! between core and non-core indices, the base relation is unchanged.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::invariants::semilinear::{NormalForm, SemilinearSet};

/// An element of the index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index {
    pub block: i64,
    pub slot: u32,
}

impl Index {
    pub const fn new(block: i64, slot: u32) -> Index {
        Index { block, slot }
    }

    /// Shorthand for specs whose blocks all have size 1.
    pub const fn unit(n: i64) -> Index {
        Index { block: n, slot: 0 }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.block, self.slot)
    }
}

/// A finite, sorted, duplicate-free set of indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct IndexSet(Vec<Index>);

impl IndexSet {
    pub fn new(items: impl IntoIterator<Item = Index>) -> IndexSet {
        let mut v: Vec<Index> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    pub fn empty() -> IndexSet {
        IndexSet(Vec::new())
    }

    /// `{lo, ..., hi}` as unit indices.
    pub fn unit_range(lo: i64, hi: i64) -> IndexSet {
        IndexSet((lo..=hi).map(Index::unit).collect())
    }

    pub fn members(&self) -> &[Index] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Index> {
        self.0.iter()
    }

    pub fn contains(&self, i: &Index) -> bool {
        self.0.binary_search(i).is_ok()
    }

    pub fn position(&self, i: &Index) -> Option<usize> {
        self.0.binary_search(i).ok()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.iter().filter(|i| other.contains(i)).copied().collect())
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.iter().filter(|i| !other.contains(i)).copied().collect())
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|i| other.contains(i))
    }

    pub fn first(&self) -> Option<&Index> {
        self.0.first()
    }

    fn insert(&mut self, i: Index) {
        if let Err(pos) = self.0.binary_search(&i) {
            self.0.insert(pos, i);
        }
    }
}

impl FromIterator<Index> for IndexSet {
    fn from_iter<T: IntoIterator<Item = Index>>(iter: T) -> Self {
        IndexSet::new(iter)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseShape {
    Z,
    N,
    NegN,
}

impl BaseShape {
    pub fn allows(self, block: i64) -> bool {
        match self {
            BaseShape::Z => true,
            BaseShape::N => block >= 0,
            BaseShape::NegN => block <= 0,
        }
    }

    pub fn id(self) -> u8 {
        match self {
            BaseShape::Z => 0,
            BaseShape::N => 1,
            BaseShape::NegN => 2,
        }
    }
}

impl fmt::Display for BaseShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseShape::Z => "Z",
            BaseShape::N => "N",
            BaseShape::NegN => "NEGN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Chain,
    Full,
    Antichain,
    /// Generating pairs `a <= b`; the relation is their reflexive-transitive
    /// closure.
    Pairs(Vec<(u32, u32)>),
}

/// A finite preordered block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockSpec {
    size: u32,
    kind: BlockKind,
    rel: Vec<bool>,
}

fn transitive_closure(n: usize, rel: &mut [bool]) {
    for k in 0..n {
        for i in 0..n {
            if rel[i * n + k] {
                for j in 0..n {
                    if rel[k * n + j] {
                        rel[i * n + j] = true;
                    }
                }
            }
        }
    }
}

impl BlockSpec {
    pub fn new(size: u32, kind: BlockKind) -> Result<BlockSpec> {
        if size == 0 {
            return Err(Error::InvalidBlock("block size must be positive".into()));
        }
        let n = size as usize;
        let mut rel = vec![false; n * n];
        for i in 0..n {
            rel[i * n + i] = true;
        }
        match &kind {
            BlockKind::Chain => {
                for i in 0..n {
                    for j in i..n {
                        rel[i * n + j] = true;
                    }
                }
            }
            BlockKind::Full => rel.iter_mut().for_each(|r| *r = true),
            BlockKind::Antichain => {}
            BlockKind::Pairs(pairs) => {
                for &(a, b) in pairs {
                    if a >= size || b >= size {
                        return Err(Error::InvalidBlock(format!("pair ({a},{b}) outside block of size {size}")));
                    }
                    rel[a as usize * n + b as usize] = true;
                }
                transitive_closure(n, &mut rel);
            }
        }
        Ok(BlockSpec { size, kind, rel })
    }

    pub fn chain(size: u32) -> BlockSpec {
        BlockSpec::new(size.max(1), BlockKind::Chain).expect("chain blocks are valid")
    }

    pub fn full(size: u32) -> BlockSpec {
        BlockSpec::new(size.max(1), BlockKind::Full).expect("full blocks are valid")
    }

    pub fn antichain(size: u32) -> BlockSpec {
        BlockSpec::new(size.max(1), BlockKind::Antichain).expect("antichain blocks are valid")
    }

    pub fn singleton() -> BlockSpec {
        BlockSpec::full(1)
    }

    /// A block given by an explicit relation matrix, which must already be
    /// reflexive and transitive.
    pub fn from_relation(size: u32, rel: Vec<bool>) -> Result<BlockSpec> {
        let n = size as usize;
        if size == 0 || rel.len() != n * n {
            return Err(Error::InvalidBlock("relation must be a nonempty square matrix".into()));
        }
        if (0..n).any(|i| !rel[i * n + i]) {
            return Err(Error::InvalidBlock("relation is not reflexive".into()));
        }
        let mut closed = rel.clone();
        transitive_closure(n, &mut closed);
        if closed != rel {
            return Err(Error::InvalidBlock("relation is not transitive".into()));
        }
        let pairs = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && rel[i * n + j])
            .map(|(i, j)| (i as u32, j as u32))
            .collect();
        Ok(BlockSpec {
            size,
            kind: BlockKind::Pairs(pairs),
            rel,
        })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn kind(&self) -> &BlockKind {
        &self.kind
    }

    pub fn leq(&self, a: u32, b: u32) -> bool {
        self.rel[a as usize * self.size as usize + b as usize]
    }

    /// Sizes of the equivalence classes of the block.
    pub fn class_sizes(&self) -> Vec<u32> {
        let mut seen = vec![false; self.size as usize];
        let mut out = Vec::new();
        for a in 0..self.size {
            if seen[a as usize] {
                continue;
            }
            let mut c = 0;
            for b in 0..self.size {
                if self.leq(a, b) && self.leq(b, a) {
                    seen[b as usize] = true;
                    c += 1;
                }
            }
            out.push(c);
        }
        out
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BlockKind::Chain => write!(f, "block({}, chain)", self.size),
            BlockKind::Full => write!(f, "block({}, full)", self.size),
            BlockKind::Antichain => write!(f, "block({}, antichain)", self.size),
            BlockKind::Pairs(p) => {
                let ps: Vec<String> = p.iter().map(|(a, b)| format!("({a},{b})")).collect();
                write!(f, "block({}, pairs: {})", self.size, ps.join(";"))
            }
        }
    }
}

/// Non-singleton parts of a finitary partition; every unlisted index stays
/// in its own class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FinitaryPartition {
    parts: Vec<IndexSet>,
}

impl FinitaryPartition {
    pub fn new(parts: Vec<IndexSet>) -> FinitaryPartition {
        FinitaryPartition { parts }
    }

    /// The partition with a single listed part.
    pub fn single(part: IndexSet) -> FinitaryPartition {
        FinitaryPartition { parts: vec![part] }
    }

    pub fn parts(&self) -> &[IndexSet] {
        &self.parts
    }
}

/// Block sizes generated from a semilinear set: non-singleton blocks sit at
/// even distance from 0 and take the members in increasing order, with a
/// singleton block between consecutive ones.
#[derive(Debug, Clone)]
struct Enumeration {
    set: SemilinearSet,
    nf: NormalForm,
}

impl Enumeration {
    fn size_at(&self, block: i64) -> u32 {
        let c = block.unsigned_abs();
        if c % 2 == 1 {
            return 1;
        }
        self.nf.nth_member(c / 2).map(|s| s as u32).unwrap_or(1)
    }
}

/// The closure of the coarsened preorder on the finite block range holding
/// every coarsening part.
#[derive(Debug)]
struct Core {
    lo: i64,
    hi: i64,
    members: Vec<Index>,
    rel: Vec<bool>,
}

impl Core {
    fn covers(&self, block: i64) -> bool {
        self.lo <= block && block <= self.hi
    }

    fn pos(&self, i: &Index) -> usize {
        self.members.binary_search(i).expect("core members cover the core blocks")
    }

    fn leq(&self, i: &Index, j: &Index) -> bool {
        let n = self.members.len();
        self.rel[self.pos(i) * n + self.pos(j)]
    }
}

/// View of one block, either stored or synthesized from an enumeration.
#[derive(Clone, Copy)]
enum BlockRef<'a> {
    Spec(&'a BlockSpec),
    Full(u32),
}

impl BlockRef<'_> {
    fn size(&self) -> u32 {
        match self {
            BlockRef::Spec(b) => b.size,
            BlockRef::Full(s) => *s,
        }
    }

    fn leq(&self, a: u32, b: u32) -> bool {
        match self {
            BlockRef::Spec(blk) => blk.leq(a, b),
            BlockRef::Full(_) => true,
        }
    }
}

/// A finitely described Z-like preorder.
#[derive(Debug, Clone)]
pub struct PreorderSpec {
    base: BaseShape,
    pattern: Vec<BlockSpec>,
    exceptions: BTreeMap<i64, BlockSpec>,
    enumeration: Option<Enumeration>,
    coarsenings: Vec<FinitaryPartition>,
    core: Option<Arc<Core>>,
}

impl PartialEq for PreorderSpec {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.pattern == other.pattern
            && self.exceptions == other.exceptions
            && self.sizes() == other.sizes()
            && self.coarsenings == other.coarsenings
    }
}

impl Eq for PreorderSpec {}

impl PreorderSpec {
    /// All blocks singletons: the usual order on the base shape.
    pub fn plain(base: BaseShape) -> PreorderSpec {
        PreorderSpec::from_pattern(base, vec![BlockSpec::singleton()]).expect("nonempty pattern")
    }

    /// Blocks repeat `pattern` periodically, with `pattern[0]` at block 0.
    pub fn from_pattern(base: BaseShape, pattern: Vec<BlockSpec>) -> Result<PreorderSpec> {
        if pattern.is_empty() {
            return Err(Error::InvalidSpec("pattern must be nonempty".into()));
        }
        Ok(PreorderSpec {
            base,
            pattern,
            exceptions: BTreeMap::new(),
            enumeration: None,
            coarsenings: Vec::new(),
            core: None,
        })
    }

    /// Block sizes read off a semilinear set (see [`Enumeration`]); for base
    /// Z the layout is mirrored to negative coordinates.
    pub fn from_sizes(base: BaseShape, sizes: SemilinearSet) -> Result<PreorderSpec> {
        if sizes.contains(0) {
            return Err(Error::InvalidSpec("block sizes must be positive".into()));
        }
        let nf = sizes.normal_form();
        if nf.nth_member(0).is_some_and(|s| s > u32::MAX as u64) {
            return Err(Error::InvalidSpec("block size too large".into()));
        }
        Ok(PreorderSpec {
            base,
            pattern: Vec::new(),
            exceptions: BTreeMap::new(),
            enumeration: Some(Enumeration { set: sizes, nf }),
            coarsenings: Vec::new(),
            core: None,
        })
    }

    /// The `[Q]` preorder of a periodic interval partition of the base:
    /// `parts` lists part sizes in order, repeated.
    pub fn periodic_intervals(base: BaseShape, parts: &[u32]) -> Result<PreorderSpec> {
        PreorderSpec::from_pattern(base, parts.iter().map(|&s| BlockSpec::full(s)).collect())
    }

    pub fn with_exception(mut self, block: i64, spec: BlockSpec) -> Result<PreorderSpec> {
        if !self.base.allows(block) {
            return Err(Error::InvalidIndex(Index::new(block, 0)));
        }
        if !self.coarsenings.is_empty() {
            return Err(Error::InvalidSpec("exceptions must precede coarsenings".into()));
        }
        self.exceptions.insert(block, spec);
        Ok(self)
    }

    pub fn base(&self) -> BaseShape {
        self.base
    }

    pub fn pattern(&self) -> &[BlockSpec] {
        &self.pattern
    }

    pub fn exceptions(&self) -> &BTreeMap<i64, BlockSpec> {
        &self.exceptions
    }

    pub fn sizes(&self) -> Option<&SemilinearSet> {
        self.enumeration.as_ref().map(|e| &e.set)
    }

    pub fn coarsenings(&self) -> &[FinitaryPartition] {
        &self.coarsenings
    }

    /// Block range holding every coarsening part.
    pub fn core_range(&self) -> Option<(i64, i64)> {
        self.core.as_ref().map(|c| (c.lo, c.hi))
    }

    /// True when every block has size 1, so integers can name indices.
    pub fn is_unit(&self) -> bool {
        let pattern_unit = self.pattern.iter().all(|b| b.size == 1);
        let exc_unit = self.exceptions.values().all(|b| b.size == 1);
        let enum_unit = self
            .enumeration
            .as_ref()
            .is_none_or(|e| e.nf.below.iter().all(|&s| s == 1) && e.nf.active.iter().all(|a| !a));
        pattern_unit && exc_unit && enum_unit
    }

    fn block_ref(&self, block: i64) -> Option<BlockRef<'_>> {
        if !self.base.allows(block) {
            return None;
        }
        if let Some(b) = self.exceptions.get(&block) {
            return Some(BlockRef::Spec(b));
        }
        if let Some(e) = &self.enumeration {
            return Some(BlockRef::Full(e.size_at(block)));
        }
        let len = self.pattern.len() as i64;
        Some(BlockRef::Spec(&self.pattern[block.rem_euclid(len) as usize]))
    }

    /// The block at a coordinate, `None` outside the base shape.
    pub fn block(&self, block: i64) -> Option<BlockSpec> {
        self.block_ref(block).map(|b| match b {
            BlockRef::Spec(s) => s.clone(),
            BlockRef::Full(s) => BlockSpec::full(s),
        })
    }

    pub fn block_size(&self, block: i64) -> Option<u32> {
        self.block_ref(block).map(|b| b.size())
    }

    pub fn is_valid(&self, i: &Index) -> bool {
        self.block_size(i.block).is_some_and(|s| i.slot < s)
    }

    pub fn check(&self, i: &Index) -> Result<()> {
        if self.is_valid(i) {
            Ok(())
        } else {
            Err(Error::InvalidIndex(*i))
        }
    }

    fn check_set(&self, s: &IndexSet) -> Result<()> {
        s.iter().try_for_each(|i| self.check(i))
    }

    fn base_leq(&self, i: &Index, j: &Index) -> bool {
        match i.block.cmp(&j.block) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self
                .block_ref(i.block)
                .is_some_and(|b| b.leq(i.slot, j.slot)),
        }
    }

    /// `i <= j` for indices already known to be valid.
    pub fn leq_unchecked(&self, i: &Index, j: &Index) -> bool {
        if let Some(core) = &self.core {
            if core.covers(i.block) && core.covers(j.block) {
                return core.leq(i, j);
            }
        }
        self.base_leq(i, j)
    }

    pub fn leq(&self, i: &Index, j: &Index) -> Result<bool> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.leq_unchecked(i, j))
    }

    /// Strictly below: `i <= j` and not `j <= i`.
    pub fn lt(&self, i: &Index, j: &Index) -> bool {
        self.leq_unchecked(i, j) && !self.leq_unchecked(j, i)
    }

    pub fn equiv(&self, i: &Index, j: &Index) -> bool {
        self.leq_unchecked(i, j) && self.leq_unchecked(j, i)
    }

    /// All indices of the blocks `lo..=hi` that exist in the base shape.
    pub fn indices_in_blocks(&self, lo: i64, hi: i64) -> Vec<Index> {
        let mut out = Vec::new();
        for b in lo..=hi {
            if let Some(size) = self.block_size(b) {
                out.extend((0..size).map(|s| Index::new(b, s)));
            }
        }
        out
    }

    /// A whole-block range containing `blocks` which is strongly convex in
    /// this preorder: it swallows the core when it meets it.
    fn candidate_blocks(&self, lo: i64, hi: i64) -> (i64, i64) {
        match &self.core {
            Some(c) if hi >= c.lo && lo <= c.hi => (lo.min(c.lo), hi.max(c.hi)),
            _ => (lo, hi),
        }
    }

    fn candidates_for<'a>(&self, items: impl Iterator<Item = &'a Index>) -> Vec<Index> {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for i in items {
            lo = lo.min(i.block);
            hi = hi.max(i.block);
        }
        if lo > hi {
            return Vec::new();
        }
        let (lo, hi) = self.candidate_blocks(lo, hi);
        self.indices_in_blocks(lo, hi)
    }

    /// `[i, j] = { k : i <= k <= j }`.
    pub fn interval(&self, i: &Index, j: &Index) -> Result<IndexSet> {
        self.check(i)?;
        self.check(j)?;
        if !self.leq_unchecked(i, j) {
            return Ok(IndexSet::empty());
        }
        Ok(self
            .candidates_for([i, j].into_iter())
            .into_iter()
            .filter(|k| self.leq_unchecked(i, k) && self.leq_unchecked(k, j))
            .collect())
    }

    /// The equivalence class `[k, k]`.
    pub fn class(&self, k: &Index) -> Result<IndexSet> {
        self.interval(k, k)
    }

    /// Smallest strongly convex superset of `s`.
    pub fn hull(&self, s: &IndexSet) -> Result<IndexSet> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        self.check_set(s)?;
        let candidates = self.candidates_for(s.iter());
        let mut out = s.clone();
        loop {
            let mut grew = false;
            for x in &candidates {
                if out.contains(x) {
                    continue;
                }
                let below_all = out.iter().all(|a| self.lt(x, a));
                let above_all = !below_all && out.iter().all(|a| self.lt(a, x));
                if !below_all && !above_all {
                    out.insert(*x);
                    grew = true;
                }
            }
            if !grew {
                return Ok(out);
            }
        }
    }

    /// Like [`hull`](Self::hull) but the empty set maps to itself.
    pub fn hull_or_empty(&self, s: &IndexSet) -> Result<IndexSet> {
        if s.is_empty() {
            Ok(IndexSet::empty())
        } else {
            self.hull(s)
        }
    }

    pub fn is_convex(&self, s: &IndexSet) -> bool {
        if !s.iter().all(|i| self.is_valid(i)) {
            return false;
        }
        let candidates = self.candidates_for(s.iter());
        // k in [i,j] for some i, j in s forces k into s.
        candidates.iter().filter(|k| !s.contains(k)).all(|k| {
            let above_some = s.iter().any(|i| self.leq_unchecked(i, k));
            let below_some = s.iter().any(|j| self.leq_unchecked(k, j));
            !(above_some && below_some)
        })
    }

    pub fn is_strongly_convex(&self, s: &IndexSet) -> bool {
        if !s.iter().all(|i| self.is_valid(i)) {
            return false;
        }
        let candidates = self.candidates_for(s.iter());
        let strong = candidates
            .iter()
            .filter(|x| !s.contains(x))
            .all(|x| s.iter().all(|a| self.lt(x, a)) || s.iter().all(|a| self.lt(a, x)));
        debug_assert!(!strong || self.is_convex(s));
        strong
    }

    /// Splits a convex set into its equivalence classes, ordered by their
    /// least member.
    pub fn classes_in(&self, s: &IndexSet) -> Vec<IndexSet> {
        let mut seen = vec![false; s.len()];
        let mut out = Vec::new();
        for (a, i) in s.iter().enumerate() {
            if seen[a] {
                continue;
            }
            let class: IndexSet = s
                .iter()
                .enumerate()
                .filter(|(_, j)| self.equiv(i, j))
                .map(|(b, j)| {
                    seen[b] = true;
                    *j
                })
                .collect();
            out.push(class);
        }
        out
    }

    /// Relation matrix `rel[a * n + b] = s[a] <= s[b]`.
    pub fn relation_on(&self, s: &IndexSet) -> Vec<bool> {
        let n = s.len();
        let m = s.members();
        let mut rel = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                rel[a * n + b] = self.leq_unchecked(&m[a], &m[b]);
            }
        }
        rel
    }

    /// Appends a finitary partition; the result implements the preorder
    /// generated by this one and the partition's equivalence.
    pub fn coarsen(&self, partition: FinitaryPartition) -> Result<PreorderSpec> {
        let mut seen = IndexSet::empty();
        for part in partition.parts() {
            self.check_set(part)?;
            if part.len() < 2 {
                return Err(Error::InvalidSpec(format!("part {part} must have at least two elements")));
            }
            if !self.is_convex(part) {
                return Err(Error::PartNotConvex(part.clone()));
            }
            if let Some(i) = part.iter().find(|i| seen.contains(i)) {
                return Err(Error::PartsOverlap(*i));
            }
            seen = seen.union(part);
        }
        let mut out = self.clone();
        out.coarsenings.push(partition);
        out.rebuild_core();
        Ok(out)
    }

    fn rebuild_core(&mut self) {
        let parts: Vec<&IndexSet> = self.coarsenings.iter().flat_map(|p| p.parts()).collect();
        if parts.is_empty() {
            self.core = None;
            return;
        }
        let lo = parts.iter().flat_map(|p| p.iter()).map(|i| i.block).min().unwrap();
        let hi = parts.iter().flat_map(|p| p.iter()).map(|i| i.block).max().unwrap();
        let members = self.indices_in_blocks(lo, hi);
        let n = members.len();
        let mut rel = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                rel[a * n + b] = self.base_leq(&members[a], &members[b]);
            }
        }
        let pos = |i: &Index| members.binary_search(i).unwrap();
        for part in &parts {
            for i in part.iter() {
                for j in part.iter() {
                    rel[pos(i) * n + pos(j)] = true;
                }
            }
        }
        transitive_closure(n, &mut rel);
        self.core = Some(Arc::new(Core { lo, hi, members, rel }));
    }

    /// The index at an integer position: block 0 slot 0 is position 0 and
    /// positions run through the slots of consecutive blocks.
    pub fn index_at(&self, pos: i64) -> Result<Index> {
        let bad = || Error::InvalidIndex(Index::new(pos, 0));
        if pos >= 0 {
            let mut rest = pos;
            let mut b = 0;
            loop {
                let size = self.block_size(b).ok_or_else(bad)? as i64;
                if rest < size {
                    return Ok(Index::new(b, rest as u32));
                }
                rest -= size;
                b += 1;
            }
        } else {
            let mut rest = -pos;
            let mut b = -1;
            loop {
                let size = self.block_size(b).ok_or_else(bad)? as i64;
                if rest <= size {
                    return Ok(Index::new(b, (size - rest) as u32));
                }
                rest -= size;
                b -= 1;
            }
        }
    }

    /// Inverse of [`index_at`](Self::index_at).
    pub fn position_of(&self, i: &Index) -> Result<i64> {
        self.check(i)?;
        let mut pos = 0i64;
        if i.block >= 0 {
            for b in 0..i.block {
                pos += self.block_size(b).unwrap() as i64;
            }
            Ok(pos + i.slot as i64)
        } else {
            for b in i.block..0 {
                pos -= self.block_size(b).unwrap() as i64;
            }
            Ok(pos + i.slot as i64)
        }
    }

    /// Positions `lo..=hi` mapped through [`index_at`](Self::index_at).
    pub fn positions(&self, lo: i64, hi: i64) -> Result<IndexSet> {
        (lo..=hi).map(|p| self.index_at(p)).collect::<Result<Vec<_>>>().map(IndexSet::new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> PreorderSpec {
        PreorderSpec::plain(BaseShape::Z)
    }

    /// Period-20 layout: a part of length 10 then ten singletons.
    fn q1() -> PreorderSpec {
        let mut parts = vec![10];
        parts.extend([1; 10]);
        PreorderSpec::periodic_intervals(BaseShape::Z, &parts).unwrap()
    }

    fn u(n: i64) -> Index {
        Index::unit(n)
    }

    #[test]
    fn plain_order() {
        let s = z();
        assert!(s.leq(&u(1), &u(4)).unwrap());
        assert!(!s.leq(&u(4), &u(1)).unwrap());
        assert_eq!(s.interval(&u(1), &u(4)).unwrap(), IndexSet::unit_range(1, 4));
        assert!(s.interval(&u(4), &u(1)).unwrap().is_empty());
        assert_eq!(s.class(&u(7)).unwrap(), IndexSet::unit_range(7, 7));
    }

    #[test]
    fn q1_classes_and_intervals() {
        let s = q1();
        let p = |n| s.index_at(n).unwrap();
        assert!(s.leq(&p(5), &p(2)).unwrap());
        assert_eq!(s.class(&p(3)).unwrap(), s.positions(0, 9).unwrap());
        assert_eq!(s.interval(&p(5), &p(5)).unwrap().len(), 10);
        assert_eq!(s.hull(&IndexSet::new([p(10), p(25)])).unwrap(), s.positions(10, 29).unwrap());
        // [0,0] is the whole part, so half a part is not even convex.
        let half = s.positions(0, 5).unwrap();
        assert!(!s.is_convex(&half));
        assert!(!s.is_strongly_convex(&half));
        let part = s.positions(0, 9).unwrap();
        assert!(s.is_convex(&part) && s.is_strongly_convex(&part));
    }

    #[test]
    fn antichain_class() {
        let s = PreorderSpec::plain(BaseShape::Z)
            .with_exception(0, BlockSpec::antichain(2))
            .unwrap();
        assert_eq!(s.class(&Index::new(0, 0)).unwrap(), IndexSet::new([Index::new(0, 0)]));
        assert!(!s.leq_unchecked(&Index::new(0, 0), &Index::new(0, 1)));
    }

    #[test]
    fn hull_and_convexity_on_chain() {
        let s = z();
        assert_eq!(s.hull(&IndexSet::new([u(1), u(5)])).unwrap(), IndexSet::unit_range(1, 5));
        assert!(s.is_strongly_convex(&IndexSet::unit_range(1, 3)));
        assert!(!s.is_convex(&IndexSet::new([u(1), u(3)])));
        assert_eq!(s.hull(&IndexSet::empty()), Err(Error::EmptySet));
    }

    #[test]
    fn coarsen_plain_z() {
        let s = z().coarsen(FinitaryPartition::single(IndexSet::unit_range(0, 2))).unwrap();
        assert_eq!(s.class(&u(1)).unwrap(), IndexSet::unit_range(0, 2));
        assert!(s.leq(&u(2), &u(0)).unwrap());
        assert!(s.lt(&u(-1), &u(2)));
        let err = z().coarsen(FinitaryPartition::single(IndexSet::new([u(1), u(3)])));
        assert!(matches!(err, Err(Error::PartNotConvex(_))));
        let overlap = FinitaryPartition::new(vec![IndexSet::unit_range(0, 1), IndexSet::unit_range(1, 2)]);
        assert!(matches!(z().coarsen(overlap), Err(Error::PartsOverlap(_))));
    }

    #[test]
    fn base_n_rejects_negative_blocks() {
        let s = PreorderSpec::plain(BaseShape::N);
        assert!(matches!(s.leq(&u(-1), &u(0)), Err(Error::InvalidIndex(_))));
        assert_eq!(s.hull(&IndexSet::new([u(0), u(2)])).unwrap(), IndexSet::unit_range(0, 2));
    }

    #[test]
    fn sizes_enumeration_layout() {
        let sizes = SemilinearSet::new([2], [(3, 2)]).unwrap();
        let s = PreorderSpec::from_sizes(BaseShape::N, sizes).unwrap();
        let got: Vec<u32> = (0..8).map(|b| s.block_size(b).unwrap()).collect();
        assert_eq!(got, vec![2, 1, 3, 1, 5, 1, 7, 1]);
        let zs = PreorderSpec::from_sizes(BaseShape::Z, SemilinearSet::finite([4])).unwrap();
        assert_eq!(zs.block_size(0), Some(4));
        assert_eq!(zs.block_size(-2), Some(1));
        assert_eq!(zs.block_size(2), Some(1));
    }

    #[test]
    fn positions_round_trip() {
        let s = q1();
        for pos in -45..45 {
            let i = s.index_at(pos).unwrap();
            assert_eq!(s.position_of(&i).unwrap(), pos);
        }
        assert_eq!(s.index_at(10).unwrap(), Index::new(1, 0));
        assert_eq!(s.index_at(-1).unwrap(), Index::new(-1, 0));
        assert_eq!(s.index_at(-11).unwrap(), Index::new(-11, 9));
    }
}
