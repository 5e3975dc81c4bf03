//! Arithmetic in finite fields GF(p^m) with q = p^m <= 2^16.
//!
//! Elements are stored as their canonical integer encoding: the coefficient
//! vector of the residue polynomial read as a base-p number, constant term
//! least significant. For prime fields this is just the residue. The encoding
//! doubles as the canonical enumeration order, so `0` is zero and `1` is one.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_ORDER: u64 = 1 << 16;

struct Inner {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, constant term first; `[0, 1]` for prime fields.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for a fixed primitive element g.
    exp: Vec<u32>,
    /// Discrete log of each nonzero element, `log[0]` unused.
    log: Vec<u32>,
    /// Full addition table for small extension fields.
    add_table: Option<Vec<u16>>,
}

/// A finite field GF(q), cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.q)
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

/// Polynomials over Z_p as coefficient vectors, constant term first.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            for (k, &c) in m.iter().enumerate() {
                let t = (c as u64 * lead as u64 % p as u64) as u32;
                r[shift + k] = (r[shift + k] + p - t) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut out);
        out
    }

    /// Monic polynomial of degree `deg` whose lower coefficients are the
    /// base-p digits of `code`.
    pub fn monic_from_code(mut code: u64, deg: u32, p: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(deg as usize + 1);
        for _ in 0..deg {
            v.push((code % p as u64) as u32);
            code /= p as u64;
        }
        v.push(1);
        v
    }

    /// Trial division by every monic polynomial of degree 1..=deg/2.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = (f.len() - 1) as u32;
        for d in 1..=deg / 2 {
            for code in 0..(p as u64).pow(d) {
                let g = monic_from_code(code, d, p);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

pub use poly::is_irreducible as poly_is_irreducible;

/// Lexicographically least monic irreducible polynomial of degree `m`,
/// comparing coefficients from the constant term upward.
fn canonical_modulus(p: u32, m: u32) -> Vec<u32> {
    let count = (p as u64).pow(m);
    (0..count)
        .map(|k| {
            // The constant term must vary slowest, so read the digits of k
            // most significant first into positions 0, 1, ...
            let mut digits = vec![0u32; m as usize];
            let mut rest = k;
            for slot in (0..m as usize).rev() {
                digits[slot] = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            digits.push(1);
            digits
        })
        .find(|f| poly::is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists")
}

impl Field {
    /// The canonical field of order `q`.
    pub fn new(q: u64) -> Result<Field> {
        if q < 2 {
            return Err(Error::NotAPrimePower(q));
        }
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        let p = smallest_prime_factor(q);
        let mut m = 0u32;
        let mut rest = q;
        while rest % p == 0 {
            rest /= p;
            m += 1;
        }
        if rest != 1 {
            return Err(Error::NotAPrimePower(q));
        }
        let (p, q) = (p as u32, q as u32);
        let modulus = if m == 1 { vec![0, 1] } else { canonical_modulus(p, m) };
        let mut inner = Inner {
            p,
            m,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: None,
        };
        inner.build_tables();
        Ok(Field(Arc::new(inner)))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// The modulus, constant term first. Prime fields report `x`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// A fixed generator of the multiplicative group.
    pub fn primitive(&self) -> u32 {
        self.0.exp[if self.0.q == 2 { 0 } else { 1 }]
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.0.q
    }

    /// Checks a literal read from text.
    pub fn literal(&self, v: u64) -> Result<u32> {
        if v < self.0.q as u64 {
            Ok(v as u32)
        } else {
            Err(Error::BadFieldLiteral {
                literal: v,
                q: self.0.q,
            })
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let f = &*self.0;
        if f.m == 1 {
            let s = a + b;
            if s >= f.p {
                s - f.p
            } else {
                s
            }
        } else if f.p == 2 {
            a ^ b
        } else if let Some(t) = &f.add_table {
            t[(a * f.q + b) as usize] as u32
        } else {
            f.digitwise(a, b, |x, y| (x + y) % f.p)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let f = &*self.0;
        if f.m == 1 {
            if a == 0 {
                0
            } else {
                f.p - a
            }
        } else if f.p == 2 {
            a
        } else {
            f.digitwise(a, 0, |x, _| (f.p - x) % f.p)
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let f = &*self.0;
        if f.m == 1 {
            return ((a as u64 * b as u64) % f.p as u64) as u32;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let e = f.log[a as usize] + f.log[b as usize];
        let n = f.q - 1;
        f.exp[(if e >= n { e - n } else { e }) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_nonzero(a))
    }

    /// Inverse of an element known to be nonzero.
    #[inline]
    pub fn inv_nonzero(&self, a: u32) -> u32 {
        let f = &*self.0;
        debug_assert!(a != 0);
        let n = f.q - 1;
        let l = f.log[a as usize];
        f.exp[((n - l) % n) as usize]
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.0.q
    }

    /// Nonzero elements in canonical order.
    pub fn units(&self) -> impl Iterator<Item = u32> {
        1..self.0.q
    }

    pub fn elem(&self, v: u32) -> Result<FieldElem> {
        Ok(FieldElem {
            field: self.clone(),
            value: self.literal(v as u64)?,
        })
    }

    /// Base-p digits of an element, constant term first.
    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        let f = &*self.0;
        let mut out = Vec::with_capacity(f.m as usize);
        let mut rest = a;
        for _ in 0..f.m {
            out.push(rest % f.p);
            rest /= f.p;
        }
        out
    }
}

impl Inner {
    fn digitwise(&self, a: u32, b: u32, op: impl Fn(u32, u32) -> u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.m {
            out += op(a % self.p, b % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    fn encode(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn decode(&self, mut a: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.m as usize);
        for _ in 0..self.m {
            v.push(a % self.p);
            a /= self.p;
        }
        poly::trim(&mut v);
        v
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let prod = poly::mul(&self.decode(a), &self.decode(b), self.p);
        self.encode(&poly::rem(&prod, &self.modulus, self.p))
    }

    fn build_tables(&mut self) {
        let n = self.q - 1;
        let order_of = |g: u32| {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = self.slow_mul(x, g);
                k += 1;
            }
            k
        };
        let g = (1..self.q)
            .find(|&g| order_of(g) == n)
            .expect("the multiplicative group is cyclic");
        let mut exp = vec![0u32; n as usize];
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x = self.slow_mul(x, g);
        }
        self.exp = exp;
        self.log = log;
        if self.m > 1 && self.p != 2 && self.q <= 256 {
            let q = self.q;
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = self.digitwise(a, b, |x, y| (x + y) % self.p) as u16;
                }
            }
            self.add_table = Some(t);
        }
    }
}

/// Arithmetic operation selector for [`FieldElem::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Neg,
}

/// An element together with its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElem {
    field: Field,
    value: u32,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@GF({})", self.value, self.field.q())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FieldElem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    /// Applies `op`; unary ops ignore `other`.
    pub fn apply(&self, other: &FieldElem, op: FieldOp) -> Result<FieldElem> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let f = &self.field;
        let (a, b) = (self.value, other.value);
        let value = match op {
            FieldOp::Add => f.add(a, b),
            FieldOp::Sub => f.sub(a, b),
            FieldOp::Mul => f.mul(a, b),
            FieldOp::Div => f.div(a, b)?,
            FieldOp::Inv => f.inv(a)?,
            FieldOp::Neg => f.neg(a),
        };
        Ok(FieldElem {
            field: f.clone(),
            value,
        })
    }

    pub fn inv(&self) -> Result<FieldElem> {
        self.apply(self, FieldOp::Inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TESTED: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 16, 27];

    #[test]
    fn make_prime_and_prime_power() {
        let f2 = Field::new(2).unwrap();
        assert_eq!((f2.p(), f2.m()), (2, 1));
        let f4 = Field::new(4).unwrap();
        assert_eq!((f4.p(), f4.m()), (2, 2));
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(9).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn make_rejects_bad_orders() {
        assert!(matches!(Field::new(12), Err(Error::NotAPrimePower(12))));
        assert!(matches!(Field::new(1), Err(Error::NotAPrimePower(1))));
        assert!(matches!(Field::new(1 << 17), Err(Error::FieldTooLarge(_))));
        assert!(Field::new(1 << 16).is_ok());
    }

    #[test]
    fn modulus_is_least_irreducible_by_brute_force() {
        for q in [4u64, 8, 9, 16, 25, 27, 49] {
            let f = Field::new(q).unwrap();
            let (p, m) = (f.p(), f.m());
            // Every candidate ordered before the chosen one must be reducible.
            let mut best = None;
            let mut cands: Vec<Vec<u32>> = (0..(p as u64).pow(m))
                .map(|c| poly::monic_from_code(c, m, p))
                .collect();
            cands.sort_by(|a, b| a[..m as usize].cmp(&b[..m as usize]));
            for c in cands {
                if poly::is_irreducible(&c, p) {
                    best = Some(c);
                    break;
                }
            }
            assert_eq!(best.as_deref(), Some(f.modulus()), "q = {q}");
        }
    }

    #[test]
    fn small_examples() {
        let f2 = Field::new(2).unwrap();
        assert_eq!(f2.add(1, 1), 0);
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.inv(2), Ok(3));
        let f4 = Field::new(4).unwrap();
        // x * x = x + 1
        assert_eq!(f4.mul(2, 2), 3);
        assert_eq!(f4.elements().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(Field::new(3).unwrap().elements().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(f5.inv(0), Err(Error::DivisionByZero));
    }

    #[test]
    fn field_elem_checks_mismatch() {
        let a = Field::new(5).unwrap().elem(2).unwrap();
        let b = Field::new(7).unwrap().elem(2).unwrap();
        assert_eq!(a.apply(&b, FieldOp::Add), Err(Error::FieldMismatch));
        assert_eq!(a.inv().unwrap().value(), 3);
        let z = Field::new(5).unwrap().elem(0).unwrap();
        assert_eq!(a.apply(&z, FieldOp::Div), Err(Error::DivisionByZero));
    }

    #[test]
    fn axioms_on_random_triples() {
        for q in TESTED {
            let f = Field::new(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(q);
            for _ in 0..10_000 {
                let (a, b, c) = (
                    rng.gen_range(0..f.q()),
                    rng.gen_range(0..f.q()),
                    rng.gen_range(0..f.q()),
                );
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.sub(f.add(a, b), b), a);
            }
        }
    }

    #[test]
    fn fermat_and_inverse_involution() {
        for q in TESTED {
            let f = Field::new(q).unwrap();
            for a in f.units() {
                assert_eq!(f.pow(a, q - 1), 1);
                let ai = f.inv_nonzero(a);
                assert_eq!(f.mul(a, ai), 1);
                assert_eq!(f.inv_nonzero(ai), a);
            }
        }
    }

    #[test]
    fn table_multiplication_matches_polynomial_reduction() {
        for q in [4u64, 8, 9, 25] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.0.slow_mul(a, b));
                }
            }
        }
    }
}
