//! Exact linear algebra over the local ring `Z/l^m`.
//!
//! Vectors are rows and matrices act on the right: `x ↦ x·A`. Every module in
//! the crate is presented by ambient generators plus a Howell-reduced matrix of
//! relations, so equality of row spans is a syntactic comparison.

mod howell;
mod module;

pub use howell::{howell_form, howell_reduce, kernel, span_order_exp, Solver};
pub use module::{FinMod, ModMap, Subquotient};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient ring `Z/l^m` with `l` prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CoefRepr", into = "CoefRepr")]
pub struct Coef {
    l: u64,
    m: u32,
    modulus: u64,
}

#[derive(Serialize, Deserialize)]
struct CoefRepr {
    l: u64,
    m: u32,
}

impl TryFrom<CoefRepr> for Coef {
    type Error = Error;
    fn try_from(r: CoefRepr) -> Result<Self> {
        Coef::new(r.l, r.m)
    }
}

impl From<Coef> for CoefRepr {
    fn from(c: Coef) -> Self {
        CoefRepr { l: c.l, m: c.m }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Coef {
    /// Products of two residues must fit in a `u64`, so `l^m < 2^31`.
    pub fn new(l: u64, m: u32) -> Result<Self> {
        if !is_prime(l) {
            return Err(Error::InvalidCoef(format!("{l} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidCoef("exponent m must be at least 1".into()));
        }
        let mut modulus: u64 = 1;
        for _ in 0..m {
            modulus = modulus
                .checked_mul(l)
                .filter(|&n| n < (1 << 31))
                .ok_or_else(|| Error::InvalidCoef(format!("{l}^{m} is too large")))?;
        }
        Ok(Coef { l, m, modulus })
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Same prime, different exponent.
    pub fn at_level(&self, m: u32) -> Result<Coef> {
        Coef::new(self.l, m)
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b) % self.modulus
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.modulus
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus - a) % self.modulus
    }

    /// `l`-adic valuation of a residue; zero has valuation `m`.
    pub fn valuation(&self, x: u64) -> u32 {
        let mut x = x % self.modulus;
        if x == 0 {
            return self.m;
        }
        let mut v = 0;
        while x.is_multiple_of(self.l) {
            x /= self.l;
            v += 1;
        }
        v
    }

    /// `l^e` as an integer (`e ≤ m`); `l^m` is the modulus itself, not reduced.
    pub fn power(&self, e: u32) -> u64 {
        self.l.pow(e)
    }

    pub fn is_unit(&self, x: u64) -> bool {
        !x.is_multiple_of(self.l)
    }

    pub fn inverse(&self, x: u64) -> Option<u64> {
        let (mut a, mut b) = ((x % self.modulus) as i64, self.modulus as i64);
        let (mut s0, mut s1) = (1i64, 0i64);
        while b != 0 {
            let q = a / b;
            (a, b) = (b, a - q * b);
            (s0, s1) = (s1, s0 - q * s1);
        }
        (a == 1).then(|| self.reduce(s0))
    }

    /// `x^e` for a unit `x`; negative exponents use the inverse.
    pub fn unit_pow(&self, x: u64, e: i64) -> Option<u64> {
        let base = if e < 0 { self.inverse(x)? } else { x % self.modulus };
        let mut acc = 1 % self.modulus;
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        Some(acc)
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "Z/{}", self.l)
        } else {
            write!(f, "Z/{}^{}", self.l, self.m)
        }
    }
}

/// Dense row-major matrix over `Z/l^m`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    coef: Coef,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat[{}x{} over {}]", self.rows, self.cols, self.coef)?;
        for i in 0..self.rows {
            write!(f, "\n  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zeros(coef: Coef, rows: usize, cols: usize) -> Self {
        Mat {
            coef,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(coef: Coef, n: usize) -> Self {
        let mut m = Self::zeros(coef, n, n);
        for i in 0..n {
            m.set(i, i, 1 % coef.modulus());
        }
        m
    }

    /// Multiplication by a scalar on a free module of rank `n`.
    pub fn scalar(coef: Coef, n: usize, s: i64) -> Self {
        let mut m = Self::zeros(coef, n, n);
        let s = coef.reduce(s);
        for i in 0..n {
            m.set(i, i, s);
        }
        m
    }

    pub fn from_rows(coef: Coef, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&x| coef.reduce(x)));
        }
        Ok(Mat {
            coef,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Rows given as already-reduced residues.
    pub fn from_residue_rows(coef: Coef, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend(r.into_iter().map(|x| x % coef.modulus()));
        }
        Mat {
            coef,
            rows: n,
            cols,
            data,
        }
    }

    pub fn row_vector(coef: Coef, v: &[u64]) -> Self {
        Self::from_residue_rows(coef, v.len(), vec![v.to_vec()])
    }

    pub fn coef(&self) -> Coef {
        self.coef
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.coef.modulus();
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.row_iter().map(<[u64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.coef, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let n = self.coef.modulus();
        let mut out = Mat::zeros(self.coef, self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = (*o + a * b) % n;
                }
            }
        }
        out
    }

    /// `v·A`.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows, "vector length does not match matrix rows");
        let n = self.coef.modulus();
        let mut out = vec![0u64; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(k)) {
                *o = (*o + a * b) % n;
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let c = self.coef;
        Mat {
            coef: c,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| c.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Mat {
        self.scale(-1)
    }

    pub fn scale(&self, s: i64) -> Mat {
        let c = self.coef;
        let s = c.reduce(s);
        Mat {
            coef: c,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| c.mul(a, s)).collect(),
        }
    }

    /// Vertical concatenation; all blocks must share the column count.
    pub fn vstack(coef: Coef, cols: usize, blocks: &[&Mat]) -> Mat {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Mat { coef, rows, cols, data }
    }

    pub fn hstack(coef: Coef, rows: usize, blocks: &[&Mat]) -> Mat {
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(coef, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            out.paste(0, off, b);
            off += b.cols;
        }
        out
    }

    pub fn block_diag(coef: Coef, blocks: &[&Mat]) -> Mat {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(coef, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.paste(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r, c)`.
    pub fn paste(&mut self, r: usize, c: usize, block: &Mat) {
        for i in 0..block.rows {
            let dst = (r + i) * self.cols + c;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(i));
        }
    }

    pub fn block(&self, r: usize, c: usize, rows: usize, cols: usize) -> Mat {
        let mut out = Mat::zeros(self.coef, rows, cols);
        for i in 0..rows {
            let src = (r + i) * self.cols + c;
            out.row_mut(i).copy_from_slice(&self.data[src..src + cols]);
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.coef, idx.len(), self.cols);
        for (o, &i) in idx.iter().enumerate() {
            out.row_mut(o).copy_from_slice(self.row(i));
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.coef, self.rows, idx.len());
        for i in 0..self.rows {
            for (o, &j) in idx.iter().enumerate() {
                out.data[i * idx.len() + o] = self.get(i, j);
            }
        }
        out
    }

    /// Entrywise image under `Z/l^m → Z/l^{m'}` for `m' ≤ m`.
    pub fn reduce_to(&self, coef: Coef) -> Mat {
        assert_eq!(coef.l(), self.coef.l(), "level change must keep the prime");
        assert!(coef.m() <= self.coef.m(), "can only reduce to a lower level");
        Mat {
            coef,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a % coef.modulus()).collect(),
        }
    }

    /// Reinterprets residues of a lower level as representatives at `coef`.
    pub fn lift_to(&self, coef: Coef) -> Mat {
        assert_eq!(coef.l(), self.coef.l());
        Mat {
            coef,
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
    }
}

/// Vector helpers shared by the modules above.
pub mod vecops {
    use super::Coef;

    pub fn axpy(c: Coef, acc: &mut [u64], s: u64, v: &[u64]) {
        if s == 0 {
            return;
        }
        let n = c.modulus();
        for (a, &x) in acc.iter_mut().zip(v) {
            *a = (*a + s * x) % n;
        }
    }

    pub fn sub_scaled(c: Coef, acc: &mut [u64], s: u64, v: &[u64]) {
        axpy(c, acc, c.neg(s % c.modulus()), v);
    }

    pub fn is_zero(v: &[u64]) -> bool {
        v.iter().all(|&x| x == 0)
    }

    pub fn sub(c: Coef, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| c.sub(x, y)).collect()
    }

    pub fn add(c: Coef, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| c.add(x, y)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coef_rejects_composites_and_zero_exponent() {
        assert!(Coef::new(4, 1).is_err());
        assert!(Coef::new(1, 1).is_err());
        assert!(Coef::new(3, 0).is_err());
        assert_eq!(Coef::new(2, 3).unwrap().modulus(), 8);
    }

    #[test]
    fn valuation_and_inverse() {
        let c = Coef::new(2, 3).unwrap();
        assert_eq!(c.valuation(0), 3);
        assert_eq!(c.valuation(4), 2);
        assert_eq!(c.valuation(6), 1);
        assert_eq!(c.inverse(3), Some(3));
        assert_eq!(c.inverse(2), None);
        assert_eq!(c.unit_pow(3, -1), Some(3));
    }

    #[test]
    fn product_and_apply_agree() {
        let c = Coef::new(3, 2).unwrap();
        let a = Mat::from_rows(c, 2, &[vec![1, 2], vec![3, 4]]).unwrap();
        let b = Mat::from_rows(c, 1, &[vec![5], vec![7]]).unwrap();
        let ab = a.mul(&b);
        assert_eq!(ab.row(0), &[19 % 9]);
        assert_eq!(a.apply(&[1, 1]), vec![4, 6]);
    }
}
