//! Windowed elements: `λ·(identity off W)` with an invertible core on a finite
//! strongly convex window `W`. They form a dense subgroup of the almost upper
//! triangular group that is closed under products and inverses.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::Mat;
use crate::preorder::{Index, IndexSet, PreorderSpec};

/// A square matrix indexed by a finite set of indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteMatrix {
    pub region: IndexSet,
    pub mat: Mat,
}

impl FiniteMatrix {
    pub fn new(region: IndexSet, mat: Mat) -> Result<FiniteMatrix> {
        if mat.n() != region.len() {
            return Err(Error::ShapeMismatch {
                rows: mat.n(),
                cols: mat.n(),
                window: region.len(),
            });
        }
        Ok(FiniteMatrix { region, mat })
    }

    pub fn identity(region: IndexSet) -> FiniteMatrix {
        let n = region.len();
        FiniteMatrix {
            region,
            mat: Mat::identity(n),
        }
    }
}

/// Rank of the deviation from the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationRank {
    Finite(usize),
    Infinite,
}

impl fmt::Display for DeviationRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeviationRank::Finite(r) => write!(f, "{r}"),
            DeviationRank::Infinite => write!(f, "INFINITE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Predicates {
    pub in_u: bool,
    pub in_u_star: bool,
    pub in_delta: bool,
    pub is_scalar: bool,
    pub deviation_finite_rank: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    General,
    Upper,
    Unitriangular,
    Diagonal,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Profile> {
        match s {
            "general" => Ok(Profile::General),
            "upper" => Ok(Profile::Upper),
            "unitriangular" => Ok(Profile::Unitriangular),
            "diagonal" => Ok(Profile::Diagonal),
            other => Err(Error::InvalidSpec(format!("unknown profile {other}"))),
        }
    }
}

/// Intermediate data of the triangular inversion series.
#[derive(Debug, Clone)]
pub struct InversionTrace {
    pub window: IndexSet,
    /// `s, s^2, ...` up to the last nonzero power.
    pub powers: Vec<Mat>,
    pub inverse: WindowElement,
}

#[derive(Clone)]
pub struct WindowElement {
    field: Field,
    preorder: Arc<PreorderSpec>,
    scalar: u32,
    window: IndexSet,
    core: Mat,
}

impl fmt::Debug for WindowElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WindowElement {{ q: {}, scalar: {}, window: {}, core: {:?} }}",
            self.field.q(),
            self.scalar,
            self.window,
            self.core
        )
    }
}

impl PartialEq for WindowElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_context(other) && self.scalar == other.scalar && self.window == other.window && self.core == other.core
    }
}

impl Eq for WindowElement {}

impl Hash for WindowElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.scalar.hash(state);
        self.window.hash(state);
        self.core.hash(state);
    }
}

impl WindowElement {
    /// Validating constructor; the result is in canonical form.
    pub fn new(
        field: Field,
        preorder: Arc<PreorderSpec>,
        scalar: u32,
        window: IndexSet,
        core: Mat,
    ) -> Result<WindowElement> {
        if scalar == 0 {
            return Err(Error::ZeroScalar);
        }
        if !field.contains(scalar) {
            return Err(Error::BadFieldLiteral {
                literal: scalar as u64,
                q: field.q(),
            });
        }
        if core.n() != window.len() {
            return Err(Error::ShapeMismatch {
                rows: core.n(),
                cols: core.n(),
                window: window.len(),
            });
        }
        if let Some(&v) = core.data().iter().find(|&&v| !field.contains(v)) {
            return Err(Error::BadFieldLiteral {
                literal: v as u64,
                q: field.q(),
            });
        }
        if !preorder.is_strongly_convex(&window) {
            return Err(Error::WindowNotStronglyConvex(window));
        }
        if !core.is_invertible(&field) {
            return Err(Error::SingularCore(window));
        }
        Ok(WindowElement {
            field,
            preorder,
            scalar,
            window,
            core,
        }
        .canonical())
    }

    /// Skips validation; only for exercising error paths on invalid input.
    #[cfg(test)]
    pub(crate) fn new_unchecked(
        field: Field,
        preorder: Arc<PreorderSpec>,
        scalar: u32,
        window: IndexSet,
        core: Mat,
    ) -> WindowElement {
        WindowElement {
            field,
            preorder,
            scalar,
            window,
            core,
        }
    }

    pub fn identity(field: Field, preorder: Arc<PreorderSpec>) -> WindowElement {
        WindowElement::scalar_elem(field, preorder, 1)
    }

    /// `λ·I`; panics on a zero scalar.
    pub fn scalar_elem(field: Field, preorder: Arc<PreorderSpec>, lambda: u32) -> WindowElement {
        assert!(lambda != 0 && field.contains(lambda), "scalar must be a unit");
        WindowElement {
            field,
            preorder,
            scalar: lambda,
            window: IndexSet::empty(),
            core: Mat::zeros(0),
        }
    }

    /// `I + c·e_ij` for `i != j`.
    pub fn elementary(field: Field, preorder: Arc<PreorderSpec>, i: Index, j: Index, c: u32) -> Result<WindowElement> {
        if i == j {
            return Err(Error::InvalidSpec("elementary matrix needs i != j".into()));
        }
        let window = preorder.hull(&IndexSet::new([i, j]))?;
        let mut core = Mat::identity(window.len());
        core.set(window.position(&i).unwrap(), window.position(&j).unwrap(), c);
        WindowElement::new(field, preorder, 1, window, core)
    }

    /// Identity except `c` at diagonal position `i`.
    pub fn diagonal_at(field: Field, preorder: Arc<PreorderSpec>, i: Index, c: u32) -> Result<WindowElement> {
        let window = preorder.hull(&IndexSet::new([i]))?;
        let mut core = Mat::identity(window.len());
        let p = window.position(&i).unwrap();
        core.set(p, p, c);
        WindowElement::new(field, preorder, 1, window, core)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn preorder(&self) -> &Arc<PreorderSpec> {
        &self.preorder
    }

    pub fn scalar(&self) -> u32 {
        self.scalar
    }

    pub fn window(&self) -> &IndexSet {
        &self.window
    }

    pub fn core(&self) -> &Mat {
        &self.core
    }

    pub fn same_context(&self, other: &WindowElement) -> bool {
        self.field == other.field && (Arc::ptr_eq(&self.preorder, &other.preorder) || *self.preorder == *other.preorder)
    }

    fn check_context(&self, other: &WindowElement) -> Result<()> {
        if self.same_context(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Entry `a_ij` of the infinite matrix.
    pub fn entry(&self, i: &Index, j: &Index) -> u32 {
        match (self.window.position(i), self.window.position(j)) {
            (Some(p), Some(q)) => self.core.get(p, q),
            _ if i == j => self.scalar,
            _ => 0,
        }
    }

    /// Shrinks the window to the hull of the indices whose row or column
    /// differs from `λ·e_i`.
    fn canonical(self) -> WindowElement {
        let n = self.window.len();
        let lambda = self.scalar;
        let trivial = |p: usize| {
            (0..n).all(|q| {
                let want = if p == q { lambda } else { 0 };
                self.core.get(p, q) == want && self.core.get(q, p) == want
            })
        };
        let moving: IndexSet = (0..n).filter(|&p| !trivial(p)).map(|p| self.window.members()[p]).collect();
        if moving.len() == n {
            return self;
        }
        let window = self.preorder.hull_or_empty(&moving).expect("window indices are valid");
        let pos: Vec<usize> = window.iter().map(|i| self.window.position(i).unwrap()).collect();
        let core = self.core.select(&pos);
        WindowElement { window, core, ..self }
    }

    /// The core on a strongly convex superset of the window.
    fn expanded_core(&self, window: &IndexSet) -> Mat {
        let mut m = Mat::scalar(window.len(), self.scalar);
        let pos: Vec<usize> = self.window.iter().map(|i| window.position(i).unwrap()).collect();
        for (a, &pa) in pos.iter().enumerate() {
            for (b, &pb) in pos.iter().enumerate() {
                m.set(pa, pb, self.core.get(a, b));
            }
        }
        m
    }

    fn with_core(&self, scalar: u32, window: IndexSet, core: Mat) -> WindowElement {
        WindowElement {
            field: self.field.clone(),
            preorder: self.preorder.clone(),
            scalar,
            window,
            core,
        }
        .canonical()
    }

    pub fn mul(&self, other: &WindowElement) -> Result<WindowElement> {
        self.check_context(other)?;
        let window = self.preorder.hull_or_empty(&self.window.union(&other.window))?;
        let a = self.expanded_core(&window);
        let b = other.expanded_core(&window);
        let scalar = self.field.mul(self.scalar, other.scalar);
        Ok(self.with_core(scalar, window, a.mul(&b, &self.field)))
    }

    pub fn inv(&self) -> WindowElement {
        let core = self.core.inverse(&self.field).expect("cores are invertible");
        self.with_core(self.field.inv_nonzero(self.scalar), self.window.clone(), core)
    }

    pub fn pow(&self, mut e: u64) -> WindowElement {
        let mut acc = WindowElement::identity(self.field.clone(), self.preorder.clone());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    /// `a^-1 b^-1 a b`
    pub fn commutator(&self, other: &WindowElement) -> Result<WindowElement> {
        self.inv().mul(&other.inv())?.mul(self)?.mul(other)
    }

    /// `g^-1 a g`
    pub fn conjugate(&self, g: &WindowElement) -> Result<WindowElement> {
        g.inv().mul(self)?.mul(g)
    }

    pub fn in_u(&self) -> bool {
        let w = self.window.members();
        (0..w.len()).all(|p| (0..w.len()).all(|q| self.core.get(p, q) == 0 || self.preorder.leq_unchecked(&w[p], &w[q])))
    }

    pub fn in_u_star(&self) -> bool {
        let w = self.window.members();
        self.scalar == 1
            && (0..w.len()).all(|p| {
                (0..w.len()).all(|q| {
                    let want = u32::from(p == q);
                    !self.preorder.leq_unchecked(&w[q], &w[p]) || self.core.get(p, q) == want
                })
            })
    }

    pub fn in_delta(&self) -> bool {
        let w = self.window.members();
        (0..w.len()).all(|p| (0..w.len()).all(|q| self.core.get(p, q) == 0 || self.preorder.equiv(&w[p], &w[q])))
    }

    pub fn is_scalar(&self) -> bool {
        self.window.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.scalar == 1
    }

    pub fn predicates(&self) -> Predicates {
        Predicates {
            in_u: self.in_u(),
            in_u_star: self.in_u_star(),
            in_delta: self.in_delta(),
            is_scalar: self.is_scalar(),
            deviation_finite_rank: self.scalar == 1,
        }
    }

    /// Class blocks of the window as position lists.
    fn class_positions(&self) -> Vec<Vec<usize>> {
        self.preorder
            .classes_in(&self.window)
            .iter()
            .map(|c| c.iter().map(|i| self.window.position(i).unwrap()).collect())
            .collect()
    }

    /// The block-diagonal part of the core, and its inverse.
    fn diagonal_part(&self) -> Result<(Mat, Mat)> {
        let n = self.window.len();
        let mut d = Mat::zeros(n);
        let mut dinv = Mat::zeros(n);
        for class in self.class_positions() {
            let block = self.core.select(&class);
            let inv = block.inverse(&self.field).ok_or_else(|| {
                Error::SingularDiagonalBlock(class.iter().map(|&p| self.window.members()[p]).collect())
            })?;
            for (a, &pa) in class.iter().enumerate() {
                for (b, &pb) in class.iter().enumerate() {
                    d.set(pa, pb, block.get(a, b));
                    dinv.set(pa, pb, inv.get(a, b));
                }
            }
        }
        Ok((d, dinv))
    }

    /// Inverse through the series `Σ s^n` where `d^-1 a = I - s` and `d` is
    /// the class-block-diagonal part; `s` is nilpotent.
    pub fn inversion_trace(&self) -> Result<InversionTrace> {
        if !self.in_u() {
            return Err(Error::NotUpperTriangular);
        }
        let f = &self.field;
        let n = self.window.len();
        let (_, dinv) = self.diagonal_part()?;
        let c = dinv.mul(&self.core, f);
        let s = Mat::identity(n).sub(&c, f);
        let mut powers = Vec::new();
        let mut sum = Mat::identity(n);
        let mut p = s.clone();
        while !p.data().iter().all(|&v| v == 0) {
            assert!(powers.len() <= n, "strictly upper part must be nilpotent");
            sum = sum.add(&p, f);
            powers.push(p.clone());
            p = p.mul(&s, f);
        }
        let core = sum.mul(&dinv, f);
        let inverse = self.with_core(f.inv_nonzero(self.scalar), self.window.clone(), core);
        Ok(InversionTrace {
            window: self.window.clone(),
            powers,
            inverse,
        })
    }

    pub fn inv_triangular(&self) -> Result<WindowElement> {
        Ok(self.inversion_trace()?.inverse)
    }

    /// `a = u·d` with `u` unitriangular and `d` block diagonal carrying the
    /// scalar.
    pub fn decompose(&self) -> Result<(WindowElement, WindowElement)> {
        if !self.in_u() {
            return Err(Error::NotUpperTriangular);
        }
        let (dcore, _) = self.diagonal_part()?;
        let d = self.with_core(self.scalar, self.window.clone(), dcore);
        let u = self.mul(&d.inv())?;
        Ok((u, d))
    }

    /// Restriction to a convex region.
    pub fn theta(&self, region: &IndexSet) -> Result<FiniteMatrix> {
        if !self.preorder.is_convex(region) {
            return Err(Error::RegionNotConvex(region.clone()));
        }
        let r = region.members();
        let n = r.len();
        let mut mat = Mat::zeros(n);
        for a in 0..n {
            for b in 0..n {
                mat.set(a, b, self.entry(&r[a], &r[b]));
            }
        }
        Ok(FiniteMatrix {
            region: region.clone(),
            mat,
        })
    }

    /// The element equal to `f` on its region and to the identity elsewhere.
    pub fn lift(f: &FiniteMatrix, field: Field, preorder: Arc<PreorderSpec>) -> Result<WindowElement> {
        if !preorder.is_convex(&f.region) {
            return Err(Error::RegionNotConvex(f.region.clone()));
        }
        if !f.mat.is_invertible(&field) {
            return Err(Error::SingularInput);
        }
        if f.region.is_empty() {
            return Ok(WindowElement::identity(field, preorder));
        }
        let window = preorder.hull(&f.region)?;
        let mut core = Mat::identity(window.len());
        let pos: Vec<usize> = f.region.iter().map(|i| window.position(i).unwrap()).collect();
        for (a, &pa) in pos.iter().enumerate() {
            for (b, &pb) in pos.iter().enumerate() {
                core.set(pa, pb, f.mat.get(a, b));
            }
        }
        WindowElement::new(field, preorder, 1, window, core)
    }

    /// Agrees with the identity on `region × region`.
    pub fn in_congruence(&self, region: &IndexSet) -> Result<bool> {
        if !self.preorder.is_convex(region) {
            return Err(Error::RegionNotConvex(region.clone()));
        }
        let r = region.members();
        Ok(r.iter().all(|i| r.iter().all(|j| self.entry(i, j) == u32::from(i == j))))
    }

    /// Equal up to a central scalar.
    pub fn projective_equal(&self, other: &WindowElement) -> Result<bool> {
        Ok(other.inv().mul(self)?.is_scalar())
    }

    pub fn deviation_rank(&self) -> (u32, DeviationRank) {
        if self.scalar != 1 {
            return (self.scalar, DeviationRank::Infinite);
        }
        let n = self.window.len();
        let dev = self.core.sub(&Mat::identity(n), &self.field);
        (1, DeviationRank::Finite(dev.rank(&self.field)))
    }

    /// `(q, base shape, window, scalar, core)` as bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 12 * self.window.len() + 4 * self.core.data().len());
        out.extend_from_slice(&self.field.q().to_le_bytes());
        out.push(self.preorder.base().id());
        out.extend_from_slice(&(self.window.len() as u32).to_le_bytes());
        for i in self.window.iter() {
            out.extend_from_slice(&i.block.to_le_bytes());
            out.extend_from_slice(&i.slot.to_le_bytes());
        }
        out.extend_from_slice(&self.scalar.to_le_bytes());
        for &v in self.core.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Deterministic pseudorandom element with the given window and profile.
    pub fn random(
        field: Field,
        preorder: Arc<PreorderSpec>,
        window: &IndexSet,
        profile: Profile,
        seed: u64,
    ) -> Result<WindowElement> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        WindowElement::random_with(&mut rng, field, preorder, window, profile)
    }

    pub fn random_with<R: Rng + ?Sized>(
        rng: &mut R,
        field: Field,
        preorder: Arc<PreorderSpec>,
        window: &IndexSet,
        profile: Profile,
    ) -> Result<WindowElement> {
        if !preorder.is_strongly_convex(window) {
            return Err(Error::WindowNotStronglyConvex(window.clone()));
        }
        let q = field.q();
        let n = window.len();
        let unit = |rng: &mut R| 1 + rng.gen_range(0..q - 1);
        let scalar = match profile {
            Profile::Unitriangular => 1,
            _ => unit(rng),
        };
        let core = match profile {
            Profile::General => loop {
                let m = Mat::from_vec(n, (0..n * n).map(|_| rng.gen_range(0..q)).collect());
                if m.is_invertible(&field) {
                    break m;
                }
            },
            _ => {
                let w = window.members();
                let mut m = Mat::zeros(n);
                let unipotent = profile == Profile::Unitriangular;
                for class in preorder.classes_in(window) {
                    let pos: Vec<usize> = class.iter().map(|i| window.position(i).unwrap()).collect();
                    let k = pos.len();
                    let block = if unipotent {
                        Mat::identity(k)
                    } else {
                        random_block(rng, &field, class.len())
                    };
                    for a in 0..k {
                        for b in 0..k {
                            m.set(pos[a], pos[b], block.get(a, b));
                        }
                    }
                }
                if profile != Profile::Diagonal {
                    for p in 0..n {
                        for r in 0..n {
                            if preorder.lt(&w[p], &w[r]) {
                                m.set(p, r, rng.gen_range(0..q));
                            }
                        }
                    }
                }
                m
            }
        };
        WindowElement::new(field, preorder, scalar, window.clone(), core)
    }
}

/// Random invertible `k x k` block; every entry of a class block is free.
fn random_block<R: Rng + ?Sized>(rng: &mut R, field: &Field, k: usize) -> Mat {
    let q = field.q();
    loop {
        let m = Mat::from_vec(k, (0..k * k).map(|_| rng.gen_range(0..q)).collect());
        if m.is_invertible(field) {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preorder::BaseShape;

    fn ctx(q: u64) -> (Field, Arc<PreorderSpec>) {
        (Field::new(q).unwrap(), Arc::new(PreorderSpec::plain(BaseShape::Z)))
    }

    fn u(n: i64) -> Index {
        Index::unit(n)
    }

    fn elem(q: u64, lo: i64, rows: &[Vec<u32>]) -> WindowElement {
        let (f, p) = ctx(q);
        let hi = lo + rows.len() as i64 - 1;
        WindowElement::new(f, p, 1, IndexSet::unit_range(lo, hi), Mat::from_rows(rows)).unwrap()
    }

    #[test]
    fn constructor_cases() {
        let (f, p) = ctx(5);
        let two = WindowElement::new(f.clone(), p.clone(), 2, IndexSet::empty(), Mat::zeros(0)).unwrap();
        assert!(two.is_scalar());
        let t = elem(2, 0, &[vec![1, 1], vec![0, 1]]);
        assert_eq!(t.entry(&u(0), &u(1)), 1);
        assert_eq!(t.entry(&u(1), &u(0)), 0);
        assert_eq!(t.entry(&u(5), &u(5)), 1);
        let bad = WindowElement::new(f.clone(), p.clone(), 1, IndexSet::new([u(1), u(3)]), Mat::identity(2));
        assert!(matches!(bad, Err(Error::WindowNotStronglyConvex(_))));
        let sing = WindowElement::new(f.clone(), p.clone(), 1, IndexSet::unit_range(0, 1), Mat::zeros(2));
        assert!(matches!(sing, Err(Error::SingularCore(_))));
        assert_eq!(WindowElement::new(f, p, 0, IndexSet::empty(), Mat::zeros(0)), Err(Error::ZeroScalar));
    }

    #[test]
    fn canonical_form_trims_trivial_rows() {
        let a = elem(3, 0, &[vec![1, 0, 0], vec![0, 1, 2], vec![0, 0, 1]]);
        assert_eq!(a.window(), &IndexSet::unit_range(1, 2));
        let i = elem(3, 0, &[vec![1, 0], vec![0, 1]]);
        assert!(i.is_identity());
    }

    #[test]
    fn heisenberg_products() {
        let a = elem(2, 1, &[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let b = elem(2, 1, &[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, elem(2, 1, &[vec![1, 1, 1], vec![0, 1, 1], vec![0, 0, 1]]));
        let c = a.commutator(&b).unwrap();
        assert_eq!(c, elem(2, 1, &[vec![1, 0, 1], vec![0, 1, 0], vec![0, 0, 1]]));
    }

    #[test]
    fn scalars_multiply_and_invert() {
        let (f, p) = ctx(5);
        let two = WindowElement::scalar_elem(f.clone(), p.clone(), 2);
        let three = WindowElement::scalar_elem(f.clone(), p.clone(), 3);
        assert!(two.mul(&three).unwrap().is_identity());
        assert_eq!(two.inv(), three);
        let t = elem(2, 1, &[vec![1, 1], vec![0, 1]]);
        assert_eq!(t.inv(), t);
    }

    #[test]
    fn triangular_inverse_on_chain() {
        let a = elem(2, 1, &[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]);
        let trace = a.inversion_trace().unwrap();
        assert_eq!(trace.powers.len(), 2);
        assert_eq!(trace.inverse, elem(2, 1, &[vec![1, 1, 1], vec![0, 1, 1], vec![0, 0, 1]]));
        assert_eq!(trace.inverse, a.inv());
    }

    #[test]
    fn triangular_inverse_rejects_singular_class_block() {
        let (f, _) = ctx(2);
        let p = Arc::new(PreorderSpec::periodic_intervals(BaseShape::Z, &[2, 1]).unwrap());
        let w = p.hull(&IndexSet::new([Index::new(0, 0), Index::new(1, 0)])).unwrap();
        let core = Mat::from_rows(&[vec![1, 1, 1], vec![1, 1, 0], vec![0, 0, 1]]);
        let a = WindowElement::new_unchecked(f, p, 1, w, core);
        assert!(a.in_u());
        assert!(matches!(a.inv_triangular(), Err(Error::SingularDiagonalBlock(_))));
        let lower = elem(2, 0, &[vec![1, 0], vec![1, 1]]);
        assert_eq!(lower.inv_triangular(), Err(Error::NotUpperTriangular));
    }

    #[test]
    fn decomposition_example() {
        let a = elem(5, 1, &[vec![1, 1], vec![0, 2]]);
        let (uu, d) = a.decompose().unwrap();
        assert_eq!(d, elem(5, 1, &[vec![1, 0], vec![0, 2]]));
        assert_eq!(uu, elem(5, 1, &[vec![1, 3], vec![0, 1]]));
        assert_eq!(uu.mul(&d).unwrap(), a);
    }

    #[test]
    fn predicates_cases() {
        let (f, p) = ctx(5);
        let two = WindowElement::scalar_elem(f, p, 2);
        let pr = two.predicates();
        assert!(pr.in_u && pr.in_delta && pr.is_scalar && !pr.in_u_star && !pr.deviation_finite_rank);
        let t = elem(5, 1, &[vec![1, 1], vec![0, 1]]);
        let pr = t.predicates();
        assert!(pr.in_u && pr.in_u_star && pr.deviation_finite_rank && !pr.in_delta && !pr.is_scalar);
        assert_eq!(t.deviation_rank(), (1, DeviationRank::Finite(1)));
        assert_eq!(two.deviation_rank(), (2, DeviationRank::Infinite));
    }

    #[test]
    fn lift_of_swap_leaves_upper_group() {
        let (f, p) = ctx(2);
        let fm = FiniteMatrix::new(IndexSet::unit_range(0, 1), Mat::from_rows(&[vec![0, 1], vec![1, 0]])).unwrap();
        let a = WindowElement::lift(&fm, f, p).unwrap();
        assert!(!a.in_u());
        assert_eq!(a.theta(&fm.region).unwrap(), fm);
    }

    #[test]
    fn congruence_and_projective() {
        let t = elem(5, 1, &[vec![1, 1], vec![0, 1]]);
        assert!(!t.in_congruence(&IndexSet::unit_range(1, 2)).unwrap());
        assert!(t.in_congruence(&IndexSet::unit_range(3, 4)).unwrap());
        let (f, p) = ctx(5);
        let three = WindowElement::scalar_elem(f, p, 3);
        let t3 = t.mul(&three).unwrap();
        assert!(t.projective_equal(&t3).unwrap());
        assert!(!t.projective_equal(&three.mul(&three.inv()).unwrap()).unwrap());
    }

    #[test]
    fn random_is_deterministic_and_respects_profile() {
        let (f, p) = ctx(3);
        let w = IndexSet::unit_range(0, 3);
        let a = WindowElement::random(f.clone(), p.clone(), &w, Profile::Upper, 9).unwrap();
        assert_eq!(a, WindowElement::random(f.clone(), p.clone(), &w, Profile::Upper, 9).unwrap());
        assert!(a.in_u());
        assert!(WindowElement::random(f.clone(), p.clone(), &w, Profile::Diagonal, 1).unwrap().in_delta());
        assert!(WindowElement::random(f, p, &w, Profile::Unitriangular, 1).unwrap().in_u_star());
    }
}
