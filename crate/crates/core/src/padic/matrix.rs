use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{ModularInt, RingParams};
use crate::{Error, Result};

/// Dense row-major matrix over `Z/p^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    params: RingParams,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zero(params: RingParams, rows: usize, cols: usize) -> Self {
        ModMatrix { rows, cols, params, data: vec![0; rows * cols] }
    }

    pub fn identity(params: RingParams, n: usize) -> Self {
        let mut m = ModMatrix::zero(params, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % params.modulus();
        }
        m
    }

    pub fn from_fn(
        params: RingParams,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> i64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(params.reduce_i64(f(i, j)));
            }
        }
        ModMatrix { rows, cols, params, data }
    }

    /// Builds a matrix from integer rows, reducing every entry.
    pub fn from_rows<R: AsRef<[i64]>>(params: RingParams, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::DimensionMismatch);
        }
        Ok(ModMatrix::from_fn(params, rows.len(), cols, |i, j| rows[i].as_ref()[j]))
    }

    /// Builds a matrix from rows of canonical residues.
    pub fn from_residue_rows(params: RingParams, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch);
            }
            data.extend(r.iter().map(|&v| params.reduce(v)));
        }
        Ok(ModMatrix { rows: rows.len(), cols, params, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set_raw(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> ModularInt {
        ModularInt::new(self.params, self.raw(i, j))
    }

    pub fn set(&mut self, i: usize, j: usize, v: ModularInt) -> Result<()> {
        if v.params() != self.params {
            return Err(Error::ParamsMismatch);
        }
        self.set_raw(i, j, v.value());
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut t = ModMatrix::zero(self.params, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set_raw(j, i, self.raw(i, j));
            }
        }
        t
    }

    pub fn try_mul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch);
        }
        let m = self.params.modulus() as u128;
        let mut out = ModMatrix::zero(self.params, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: u128 = 0;
                for k in 0..self.cols {
                    acc = (acc + self.raw(i, k) as u128 * other.raw(k, j) as u128) % m;
                }
                out.set_raw(i, j, acc as u64);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch);
        }
        let pr = self.params;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| pr.add(a, b)).collect();
        Ok(ModMatrix { data, ..*self })
    }

    pub fn try_sub(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch);
        }
        let pr = self.params;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| pr.sub(a, b)).collect();
        Ok(ModMatrix { data, ..*self })
    }

    pub fn scale(&self, c: u64) -> ModMatrix {
        let pr = self.params;
        let c = pr.reduce(c);
        ModMatrix { data: self.data.iter().map(|&a| pr.mul(a, c)).collect(), ..*self }
    }

    pub fn pow(&self, mut e: u64) -> Result<ModMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch);
        }
        let mut acc = ModMatrix::identity(self.params, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `y = M x` for a column vector of residues.
    pub fn apply(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch);
        }
        let m = self.params.modulus() as u128;
        Ok((0..self.rows)
            .map(|i| {
                let mut acc: u128 = 0;
                for (j, &xj) in x.iter().enumerate() {
                    acc = (acc + self.raw(i, j) as u128 * xj as u128) % m;
                }
                acc as u64
            })
            .collect())
    }

    /// Reinterprets the integer representatives in another ring of the same prime.
    pub fn lift_to(&self, params: RingParams) -> Result<ModMatrix> {
        if params.p() != self.params.p() {
            return Err(Error::ParamsMismatch);
        }
        let data = self.data.iter().map(|&a| params.reduce(a)).collect();
        Ok(ModMatrix { rows: self.rows, cols: self.cols, params, data })
    }

    /// `omega_n(S - 1) = 1 + S + ... + S^{p^n - 1}` for a square matrix `S`.
    ///
    /// Uses `omega_{k+1} = omega_k * (1 + S^{p^k} + ... + S^{(p-1) p^k})`, and once
    /// `S^{p^k}` is the identity every further factor is multiplication by `p`.
    pub fn omega_sum(&self, n: u32) -> Result<ModMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch);
        }
        let p = self.params.p();
        let id = ModMatrix::identity(self.params, self.rows);
        let mut acc = id.clone();
        let mut s = self.clone();
        for k in 0..n {
            if s == id {
                let remaining = n - k;
                return Ok(acc.scale(self.params.p_pow(remaining)));
            }
            let mut factor = id.clone();
            let mut term = id.clone();
            for _ in 1..p {
                term = term.try_mul(&s)?;
                factor = factor.try_add(&term)?;
            }
            acc = acc.try_mul(&factor)?;
            s = term.try_mul(&s)?;
        }
        Ok(acc)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += c * row[src]`.
    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, c: u64) {
        let pr = self.params;
        for j in 0..self.cols {
            let v = pr.add(self.raw(dst, j), pr.mul(c, self.raw(src, j)));
            self.set_raw(dst, j, v);
        }
    }

    /// `col[dst] += c * col[src]`.
    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, c: u64) {
        let pr = self.params;
        for i in 0..self.rows {
            let v = pr.add(self.raw(i, dst), pr.mul(c, self.raw(i, src)));
            self.set_raw(i, dst, v);
        }
    }

    pub(crate) fn scale_row(&mut self, i: usize, c: u64) {
        let pr = self.params;
        for j in 0..self.cols {
            let v = pr.mul(c, self.raw(i, j));
            self.set_raw(i, j, v);
        }
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.raw(i, j))?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_sum_matches_plain_geometric_sum() {
        let pr = RingParams::new(3, 4).unwrap();
        let s = ModMatrix::from_rows(pr, &[[1, 1], [3, 4]]).unwrap();
        for n in 0..4 {
            let mut plain = ModMatrix::zero(pr, 2, 2);
            let mut term = ModMatrix::identity(pr, 2);
            for _ in 0..3u64.pow(n) {
                plain = plain.try_add(&term).unwrap();
                term = term.try_mul(&s).unwrap();
            }
            assert_eq!(s.omega_sum(n).unwrap(), plain, "n = {n}");
        }
    }

    #[test]
    fn identity_shortcut() {
        let pr = RingParams::new(2, 10).unwrap();
        let id = ModMatrix::identity(pr, 3);
        assert_eq!(id.omega_sum(5).unwrap(), id.scale(32));
        assert_eq!(id.omega_sum(12).unwrap(), ModMatrix::zero(pr, 3, 3));
    }
}
