//! Dense square matrices over a [`Field`], with exact elimination.

use std::fmt;

use crate::gf::Field;

/// Row-major square matrix of canonical field encodings.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    n: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.n {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "{:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(n: usize) -> Mat {
        Mat {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Mat {
        Mat::scalar(n, 1)
    }

    pub fn scalar(n: usize, lambda: u32) -> Mat {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = lambda;
        }
        m
    }

    /// Builds from row-major data; panics if the length is not a square.
    pub fn from_vec(n: usize, data: Vec<u32>) -> Mat {
        assert_eq!(data.len(), n * n, "matrix data must be n*n");
        Mat { n, data }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Mat {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        Mat { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar_with(1)
    }

    pub fn is_scalar_with(&self, lambda: u32) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == if i == j { lambda } else { 0 }))
    }

    /// The scalar value if this is a scalar matrix.
    pub fn as_scalar(&self) -> Option<u32> {
        if self.n == 0 {
            return None;
        }
        let l = self.get(0, 0);
        self.is_scalar_with(l).then_some(l)
    }

    /// Submatrix on the given row/column positions.
    pub fn select(&self, pos: &[usize]) -> Mat {
        let k = pos.len();
        let mut out = Mat::zeros(k);
        for (a, &i) in pos.iter().enumerate() {
            for (b, &j) in pos.iter().enumerate() {
                out.data[a * k + b] = self.get(i, j);
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat, f: &Field) -> Mat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Mat::zeros(n);
        if f.m() == 1 {
            let p = f.p() as u64;
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0u64;
                    for k in 0..n {
                        acc += self.data[i * n + k] as u64 * other.data[k * n + j] as u64;
                    }
                    out.data[i * n + j] = (acc % p) as u32;
                }
            }
        } else {
            for i in 0..n {
                for k in 0..n {
                    let a = self.data[i * n + k];
                    if a == 0 {
                        continue;
                    }
                    for j in 0..n {
                        let t = f.mul(a, other.data[k * n + j]);
                        out.data[i * n + j] = f.add(out.data[i * n + j], t);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat, f: &Field) -> Mat {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Mat { n: self.n, data }
    }

    pub fn sub(&self, other: &Mat, f: &Field) -> Mat {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Mat { n: self.n, data }
    }

    pub fn scale(&self, c: u32, f: &Field) -> Mat {
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        Mat { n: self.n, data }
    }

    /// Inverse by Gauss-Jordan elimination with first-nonzero pivoting.
    pub fn inverse(&self, f: &Field) -> Option<Mat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| a.get(r, col) != 0)?;
            if piv != col {
                a.swap_rows(piv, col);
                inv.swap_rows(piv, col);
            }
            let s = f.inv_nonzero(a.get(col, col));
            a.scale_row(col, s, f);
            inv.scale_row(col, s, f);
            for r in 0..n {
                if r != col {
                    let c = a.get(r, col);
                    if c != 0 {
                        let nc = f.neg(c);
                        a.axpy_row(r, col, nc, f);
                        inv.axpy_row(r, col, nc, f);
                    }
                }
            }
        }
        Some(inv)
    }

    /// Determinant by elimination with first-nonzero pivoting; row swaps
    /// flip the sign.
    pub fn det(&self, f: &Field) -> u32 {
        let n = self.n;
        let mut a = self.clone();
        let mut det = 1;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a.get(r, col) != 0) else {
                return 0;
            };
            if piv != col {
                a.swap_rows(piv, col);
                det = f.neg(det);
            }
            let d = a.get(col, col);
            det = f.mul(det, d);
            let di = f.inv_nonzero(d);
            for r in col + 1..n {
                let c = a.get(r, col);
                if c != 0 {
                    a.axpy_row(r, col, f.neg(f.mul(c, di)), f);
                }
            }
        }
        det
    }

    pub fn rank(&self, f: &Field) -> usize {
        let n = self.n;
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| a.get(r, col) != 0) else {
                continue;
            };
            a.swap_rows(piv, rank);
            let di = f.inv_nonzero(a.get(rank, col));
            for r in rank + 1..n {
                let c = a.get(r, col);
                if c != 0 {
                    a.axpy_row(r, rank, f.neg(f.mul(c, di)), f);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self, f: &Field) -> bool {
        self.rank(f) == self.n
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.n {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: u32, f: &Field) {
        for j in 0..self.n {
            let v = &mut self.data[r * self.n + j];
            *v = f.mul(*v, s);
        }
    }

    /// row[dst] += c * row[src]
    fn axpy_row(&mut self, dst: usize, src: usize, c: u32, f: &Field) {
        for j in 0..self.n {
            let t = f.mul(c, self.data[src * self.n + j]);
            let v = &mut self.data[dst * self.n + j];
            *v = f.add(*v, t);
        }
    }
}

/// Row-reduced basis of the null space of a `rows x cols` system given
/// row-major. Used for commutant computations.
pub fn null_space(rows: usize, cols: usize, system: &[u32], f: &Field) -> Vec<Vec<u32>> {
    let mut a: Vec<Vec<u32>> = (0..rows).map(|r| system[r * cols..(r + 1) * cols].to_vec()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(piv, rank);
        let s = f.inv_nonzero(a[rank][col]);
        for v in a[rank].iter_mut() {
            *v = f.mul(*v, s);
        }
        for r in 0..rows {
            if r != rank && a[r][col] != 0 {
                let c = f.neg(a[r][col]);
                for j in 0..cols {
                    let t = f.mul(c, a[rank][j]);
                    a[r][j] = f.add(a[r][j], t);
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u32; cols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(a[r][fc]);
            }
            v
        })
        .collect()
}
