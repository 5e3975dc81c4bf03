//! Finite truncation groups: the restrictions of the upper triangular group
//! to a finite convex region, and the finite general linear groups they sit
//! in. Orders come from closed formulas; enumeration, closure and
//! centralizers are brute force with hashed deduplication.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{null_space, Mat};
use crate::matgroup::FiniteMatrix;
use crate::preorder::{IndexSet, PreorderSpec};

pub const DEFAULT_MAX_ORDER: u128 = 1 << 24;

/// The enumeration budget, overridable through `AUT_MAX_ORDER`.
pub fn max_order_from_env() -> u128 {
    std::env::var("AUT_MAX_ORDER")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

fn checked_pow(q: u128, e: u64) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(q).ok_or(Error::OrderOverflow)?;
    }
    Ok(acc)
}

/// `|GL_n(F_q)| = ∏_{i<n} (q^n - q^i)`.
pub fn gl_order(n: usize, q: u32) -> Result<u128> {
    let qn = checked_pow(q as u128, n as u64)?;
    let mut acc: u128 = 1;
    for i in 0..n {
        let term = qn - checked_pow(q as u128, i as u64)?;
        acc = acc.checked_mul(term).ok_or(Error::OrderOverflow)?;
    }
    Ok(acc)
}

/// `|SL_n(F_q)| = |GL_n(F_q)| / (q - 1)`.
pub fn sl_order(n: usize, q: u32) -> Result<u128> {
    Ok(gl_order(n, q)? / (q as u128 - 1))
}

/// Generators of `GL_n(F_q)`: elementary transvections and one diagonal
/// matrix per position carrying a primitive element.
pub fn gl_generators(n: usize, field: &Field) -> Vec<Mat> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut m = Mat::identity(n);
                m.set(i, j, 1);
                gens.push(m);
            }
        }
    }
    if field.q() > 2 {
        for i in 0..n {
            let mut m = Mat::identity(n);
            m.set(i, i, field.primitive());
            gens.push(m);
        }
    }
    gens
}

/// All invertible `n x n` matrices, in canonical entry order.
pub fn enumerate_gl(n: usize, field: &Field, max_order: u128) -> Result<Vec<Mat>> {
    let order = gl_order(n, field.q())?;
    if order > max_order {
        return Err(Error::OrderBudgetExceeded(max_order));
    }
    let q = field.q();
    let total = checked_pow(q as u128, (n * n) as u64)?;
    let mut out = Vec::with_capacity(order as usize);
    let mut digits = vec![0u32; n * n];
    for _ in 0..total {
        let m = Mat::from_vec(n, digits.clone());
        if m.is_invertible(field) {
            out.push(m);
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Packed(u128),
    Bytes(Vec<u8>),
}

/// Canonical bytes of a finite matrix: dimension, then entries row-major.
pub fn matrix_bytes(m: &Mat) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 2 * m.data().len());
    out.extend_from_slice(&(m.n() as u32).to_le_bytes());
    for &v in m.data() {
        out.extend_from_slice(&(v as u16).to_le_bytes());
    }
    out
}

/// FNV-1a over the canonical bytes; stable across runs and platforms.
pub fn matrix_hash(m: &Mat) -> u64 {
    matrix_bytes(m).iter().fold(0xcbf29ce484222325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

/// A deduplicated set of invertible matrices of one size over one field.
#[derive(Debug, Clone)]
pub struct FiniteGroupSet {
    n: usize,
    field: Field,
    packed: bool,
    elems: Vec<Mat>,
    index: HashMap<Key, usize>,
    generators: Vec<Mat>,
    closed: bool,
}

impl FiniteGroupSet {
    pub fn new(n: usize, field: Field) -> FiniteGroupSet {
        let bits = (field.q() as f64).log2() * (n * n) as f64;
        FiniteGroupSet {
            n,
            field,
            packed: bits < 127.0,
            elems: Vec::new(),
            index: HashMap::new(),
            generators: Vec::new(),
            closed: false,
        }
    }

    fn key(&self, m: &Mat) -> Key {
        if self.packed {
            let q = self.field.q() as u128;
            Key::Packed(m.data().iter().fold(0u128, |acc, &v| acc * q + v as u128))
        } else {
            Key::Bytes(matrix_bytes(m))
        }
    }

    /// Inserts, returning whether the matrix was new.
    pub fn insert(&mut self, m: Mat) -> bool {
        assert_eq!(m.n(), self.n, "matrix size must match the set");
        let k = self.key(&m);
        if self.index.contains_key(&k) {
            return false;
        }
        self.index.insert(k, self.elems.len());
        self.elems.push(m);
        self.closed = false;
        true
    }

    pub fn contains(&self, m: &Mat) -> bool {
        m.n() == self.n && self.index.contains_key(&self.key(m))
    }

    pub fn members(&self) -> &[Mat] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// The subgroup generated by `generators`.
    pub fn closure(n: usize, field: &Field, generators: &[Mat], max_order: u128) -> Result<FiniteGroupSet> {
        let mut g = FiniteGroupSet::new(n, field.clone());
        g.insert(Mat::identity(n));
        g.extend(generators, max_order)?;
        Ok(g)
    }

    /// Closes under right multiplication by the old and the new generators
    /// and their inverses. When the set was already closed, only the new
    /// generators need to be applied to existing members.
    pub fn extend(&mut self, new_gens: &[Mat], max_order: u128) -> Result<()> {
        let f = self.field.clone();
        let was_closed = self.closed;
        let mut fresh = Vec::new();
        for g in new_gens {
            if !g.is_identity() && !self.generators.contains(g) {
                fresh.push(g.clone());
                let gi = g.inverse(&f).expect("generators must be invertible");
                if gi != *g {
                    fresh.push(gi);
                }
                self.generators.push(g.clone());
            }
        }
        if self.elems.is_empty() {
            self.insert(Mat::identity(self.n));
        }
        let all: Vec<Mat> = {
            let mut v: Vec<Mat> = self
                .generators
                .iter()
                .flat_map(|g| {
                    let gi = g.inverse(&f).unwrap();
                    if gi == *g {
                        vec![g.clone()]
                    } else {
                        vec![g.clone(), gi]
                    }
                })
                .collect();
            v.dedup();
            v
        };
        let mut queue = std::collections::VecDeque::new();
        let old = self.elems.len();
        let first_pass = if was_closed { &fresh } else { &all };
        for x in 0..old {
            for g in first_pass {
                let y = self.elems[x].mul(g, &f);
                if self.insert(y) {
                    queue.push_back(self.elems.len() - 1);
                }
            }
            self.check_budget(max_order)?;
        }
        while let Some(x) = queue.pop_front() {
            for g in &all {
                let y = self.elems[x].mul(g, &f);
                if self.insert(y) {
                    queue.push_back(self.elems.len() - 1);
                }
            }
            self.check_budget(max_order)?;
        }
        self.closed = true;
        Ok(())
    }

    fn check_budget(&self, max_order: u128) -> Result<()> {
        if self.elems.len() as u128 > max_order {
            Err(Error::OrderBudgetExceeded(max_order))
        } else {
            Ok(())
        }
    }

    /// Smallest subgroup containing `g` and normalized by the generators of
    /// `ambient` (all members when it has none recorded).
    pub fn normal_closure(g: &Mat, ambient: &FiniteGroupSet, max_order: u128) -> Result<FiniteGroupSet> {
        FiniteGroupSet::normal_closure_under(g, &ambient.conjugators(), &ambient.field, max_order)
    }

    /// Smallest subgroup containing `g` and closed under conjugation by each
    /// of `conjugators`, which need not be enumerated.
    pub fn normal_closure_under(
        g: &Mat,
        conjugators: &[Mat],
        f: &Field,
        max_order: u128,
    ) -> Result<FiniteGroupSet> {
        let conj: Vec<(Mat, Mat)> = conjugators
            .iter()
            .map(|h| (h.clone(), h.inverse(f).expect("conjugators must be invertible")))
            .collect();
        let mut set = FiniteGroupSet::closure(g.n(), f, std::slice::from_ref(g), max_order)?;
        let mut checked = 0;
        while checked < set.generators.len() {
            let x = set.generators[checked].clone();
            checked += 1;
            let mut new = Vec::new();
            for (h, hi) in &conj {
                let y = hi.mul(&x, f).mul(h, f);
                if !set.contains(&y) && !new.contains(&y) {
                    new.push(y);
                }
            }
            if !new.is_empty() {
                set.extend(&new, max_order)?;
            }
        }
        Ok(set)
    }

    fn conjugators(&self) -> Vec<Mat> {
        if self.generators.is_empty() {
            self.elems.clone()
        } else {
            self.generators.clone()
        }
    }

    /// Members commuting with every target.
    pub fn centralizer(&self, targets: &[Mat]) -> FiniteGroupSet {
        let f = &self.field;
        let mut out = FiniteGroupSet::new(self.n, f.clone());
        for a in &self.elems {
            if targets.iter().all(|t| a.mul(t, f) == t.mul(a, f)) {
                out.insert(a.clone());
            }
        }
        out
    }

    /// Members with determinant 1.
    pub fn det_one_count(&self) -> usize {
        self.elems.iter().filter(|m| m.det(&self.field) == 1).count()
    }

    /// `SL_n ⊆ self`, by counting determinant-one members.
    pub fn contains_sl(&self) -> Result<bool> {
        Ok(self.det_one_count() as u128 == sl_order(self.n, self.field.q())?)
    }

    pub fn generator_hashes(&self) -> Vec<u64> {
        self.generators.iter().map(matrix_hash).collect()
    }
}

/// A finite convex region of a preorder over a field.
#[derive(Debug, Clone)]
pub struct Truncation {
    preorder: Arc<PreorderSpec>,
    region: IndexSet,
    field: Field,
    rel: Vec<bool>,
}

impl Truncation {
    pub fn new(preorder: Arc<PreorderSpec>, region: IndexSet, field: Field) -> Result<Truncation> {
        if !preorder.is_convex(&region) {
            return Err(Error::RegionNotConvex(region));
        }
        let rel = preorder.relation_on(&region);
        Ok(Truncation {
            preorder,
            region,
            field,
            rel,
        })
    }

    pub fn preorder(&self) -> &Arc<PreorderSpec> {
        &self.preorder
    }

    pub fn region(&self) -> &IndexSet {
        &self.region
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.region.len()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.rel[a * self.n() + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) && !self.leq(b, a)
    }

    /// Class blocks as position lists, ordered by least member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for a in 0..n {
            if !seen[a] {
                let c: Vec<usize> = (a..n).filter(|&b| self.leq(a, b) && self.leq(b, a)).collect();
                c.iter().for_each(|&b| seen[b] = true);
                out.push(c);
            }
        }
        out
    }

    /// Pairs `(a, b)` with `a` strictly below `b`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| self.lt(a, b)).collect()
    }

    /// `∏_classes |GL_{n(k)}| · q^s` with `s` the number of strict pairs.
    pub fn order_u(&self) -> Result<u128> {
        let q = self.field.q();
        let mut acc = checked_pow(q as u128, self.strict_pairs().len() as u64)?;
        for c in self.classes() {
            acc = acc.checked_mul(gl_order(c.len(), q)?).ok_or(Error::OrderOverflow)?;
        }
        Ok(acc)
    }

    pub fn order_gl(&self) -> Result<u128> {
        gl_order(self.n(), self.field.q())
    }

    /// Zero wherever the row index is not below the column index.
    pub fn is_upper(&self, m: &Mat) -> bool {
        let n = self.n();
        (0..n).all(|a| (0..n).all(|b| m.get(a, b) == 0 || self.leq(a, b)))
    }

    /// Generators of the upper group: class-block generators and strict
    /// elementary matrices.
    pub fn u_generators(&self) -> Vec<Mat> {
        let n = self.n();
        let mut gens = Vec::new();
        for c in self.classes() {
            for g in gl_generators(c.len(), &self.field) {
                let mut m = Mat::identity(n);
                for (a, &pa) in c.iter().enumerate() {
                    for (b, &pb) in c.iter().enumerate() {
                        m.set(pa, pb, g.get(a, b));
                    }
                }
                gens.push(m);
            }
        }
        for (a, b) in self.strict_pairs() {
            let mut m = Mat::identity(n);
            m.set(a, b, 1);
            gens.push(m);
        }
        gens
    }

    /// Every element of the upper group, built from class blocks and free
    /// strict entries.
    pub fn enumerate_u(&self, max_order: u128) -> Result<FiniteGroupSet> {
        let order = self.order_u()?;
        if order > max_order {
            return Err(Error::OrderBudgetExceeded(max_order));
        }
        let n = self.n();
        let q = self.field.q();
        let classes = self.classes();
        let blocks: Vec<Vec<Mat>> =
            classes.iter().map(|c| enumerate_gl(c.len(), &self.field, max_order)).collect::<Result<_>>()?;
        let pairs = self.strict_pairs();
        let mut set = FiniteGroupSet::new(n, self.field.clone());
        let mut choice = vec![0usize; classes.len()];
        loop {
            let mut base = Mat::zeros(n);
            for (k, c) in classes.iter().enumerate() {
                let blk = &blocks[k][choice[k]];
                for (a, &pa) in c.iter().enumerate() {
                    for (b, &pb) in c.iter().enumerate() {
                        base.set(pa, pb, blk.get(a, b));
                    }
                }
            }
            let mut digits = vec![0u32; pairs.len()];
            loop {
                let mut m = base.clone();
                for (&(a, b), &d) in pairs.iter().zip(&digits) {
                    m.set(a, b, d);
                }
                set.insert(m);
                if !bump(&mut digits, q) {
                    break;
                }
            }
            let mut k = classes.len();
            loop {
                if k == 0 {
                    set.generators = self.u_generators();
                    set.closed = true;
                    return Ok(set);
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < blocks[k].len() {
                    break;
                }
                choice[k] = 0;
            }
        }
    }

    /// The full `GL` of the region with its standard generators.
    pub fn enumerate_gl(&self, max_order: u128) -> Result<FiniteGroupSet> {
        let mut set = FiniteGroupSet::new(self.n(), self.field.clone());
        for m in enumerate_gl(self.n(), &self.field, max_order)? {
            set.insert(m);
        }
        set.generators = gl_generators(self.n(), &self.field);
        set.closed = true;
        Ok(set)
    }

    pub fn closure(&self, generators: &[FiniteMatrix], max_order: u128) -> Result<FiniteGroupSet> {
        let mats: Vec<Mat> = generators.iter().map(|g| self.own(g)).collect::<Result<_>>()?;
        FiniteGroupSet::closure(self.n(), &self.field, &mats, max_order)
    }

    fn own(&self, g: &FiniteMatrix) -> Result<Mat> {
        if g.region != self.region {
            return Err(Error::ContextMismatch);
        }
        if !g.mat.is_invertible(&self.field) {
            return Err(Error::SingularInput);
        }
        Ok(g.mat.clone())
    }

    /// Elements of the upper group commuting with every target, via the
    /// linear commutant: solve `XT = TX` on the upper pattern, then keep the
    /// invertible solutions. Independent of [`FiniteGroupSet::centralizer`].
    pub fn centralizer_in_u(&self, targets: &[Mat], max_order: u128) -> Result<FiniteGroupSet> {
        let n = self.n();
        let f = &self.field;
        let vars: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| self.leq(a, b)).collect();
        let var_of: HashMap<(usize, usize), usize> = vars.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let cols = vars.len();
        let mut system = Vec::new();
        for t in targets {
            // (XT - TX)_{ab} = Σ_c X_ac T_cb - T_ac X_cb
            for a in 0..n {
                for b in 0..n {
                    let mut row = vec![0u32; cols];
                    for c in 0..n {
                        if let Some(&k) = var_of.get(&(a, c)) {
                            row[k] = f.add(row[k], t.get(c, b));
                        }
                        if let Some(&k) = var_of.get(&(c, b)) {
                            row[k] = f.sub(row[k], t.get(a, c));
                        }
                    }
                    if row.iter().any(|&v| v != 0) {
                        system.extend(row);
                    }
                }
            }
        }
        let rows = system.len() / cols.max(1);
        let basis = if rows == 0 {
            (0..cols)
                .map(|k| {
                    let mut v = vec![0; cols];
                    v[k] = 1;
                    v
                })
                .collect()
        } else {
            null_space(rows, cols, &system, f)
        };
        let size = checked_pow(f.q() as u128, basis.len() as u64)?;
        if size > max_order {
            return Err(Error::OrderBudgetExceeded(max_order));
        }
        let mut out = FiniteGroupSet::new(n, f.clone());
        let mut coeffs = vec![0u32; basis.len()];
        loop {
            let mut m = Mat::zeros(n);
            for (c, v) in coeffs.iter().zip(&basis) {
                if *c != 0 {
                    for (k, &(a, b)) in vars.iter().enumerate() {
                        m.set(a, b, f.add(m.get(a, b), f.mul(*c, v[k])));
                    }
                }
            }
            if m.is_invertible(f) {
                out.insert(m);
            }
            if !bump(&mut coeffs, f.q()) {
                break;
            }
        }
        Ok(out)
    }

    /// Index of the congruence kernel of `inner`: the order of the upper
    /// group of `inner`.
    pub fn index_congruence(&self, inner: &IndexSet) -> Result<u128> {
        if !inner.is_subset(&self.region) {
            return Err(Error::RegionNotNested);
        }
        if inner.is_empty() {
            return Ok(1);
        }
        Truncation::new(self.preorder.clone(), inner.clone(), self.field.clone())?.order_u()
    }
}

/// Mixed-radix increment; false on wrap-around.
fn bump(digits: &mut [u32], q: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}
