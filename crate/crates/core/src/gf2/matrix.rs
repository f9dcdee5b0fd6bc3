//! Dense bit-packed matrices over Z₂.
//!
//! Each row is a single `u64` word with bit `j` holding column `j`, so a
//! matrix can have any number of rows but at most 64 columns. Everything in
//! this crate stays far below that (2n ≤ 32 for n ≤ 16).

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_COLS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

#[inline]
fn col_mask(cols: usize) -> u64 {
    if cols == 64 {
        u64::MAX
    } else {
        (1u64 << cols) - 1
    }
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape {
                rows,
                cols,
                reason: "rows and cols must be at least 1",
            });
        }
        if cols > MAX_COLS {
            return Err(Error::InvalidShape {
                rows,
                cols,
                reason: "at most 64 columns are supported",
            });
        }
        Ok(Self {
            rows,
            cols,
            data: vec![0; rows],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i] = 1 << i;
        }
        Ok(m)
    }

    /// Builds a matrix from packed row words. Bits above `cols` are rejected.
    pub fn from_row_words(rows: usize, cols: usize, words: Vec<u64>) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        if words.len() != rows {
            return Err(Error::LengthMismatch(words.len(), rows));
        }
        if words.iter().any(|w| w & !col_mask(cols) != 0) {
            return Err(Error::InvalidShape {
                rows,
                cols,
                reason: "row word has bits beyond the column count",
            });
        }
        m.data = words;
        Ok(m)
    }

    /// Builds a matrix from nested rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.as_ref().len()).unwrap_or(0);
        let mut m = Self::zeros(r, c)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::LengthMismatch(row.len(), c));
            }
            for (j, &bit) in row.iter().enumerate() {
                match bit {
                    0 => {}
                    1 => m.data[i] |= 1 << j,
                    _ => {
                        return Err(Error::Parse(format!(
                            "entry ({i},{j}) = {bit} is not a bit"
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn diagonal(bits: &[u8]) -> Result<Self> {
        let mut m = Self::zeros(bits.len(), bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            m.set(i, i, b & 1 == 1);
        }
        Ok(m)
    }

    /// Assembles `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        let top = tl.hstack(tr)?;
        let bottom = bl.hstack(br)?;
        top.vstack(&bottom)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        (self.data[i] >> j) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        if value {
            self.data[i] |= 1 << j;
        } else {
            self.data[i] &= !(1 << j);
        }
    }

    #[inline]
    pub fn row_word(&self, i: usize) -> u64 {
        self.data[i]
    }

    pub fn row_words(&self) -> &[u64] {
        &self.data
    }

    /// Column `j` packed as a word with bit `i` = entry `(i, j)`. Requires rows ≤ 64.
    pub fn col_word(&self, j: usize) -> u64 {
        assert!(self.rows <= 64, "col_word needs at most 64 rows");
        self.data
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &w)| acc | (((w >> j) & 1) << i))
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && self.data.iter().enumerate().all(|(i, &w)| w == 1 << i)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "multiply",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols)?;
        for (dst, &row) in out.data.iter_mut().zip(&self.data) {
            let mut bits = row;
            let mut acc = 0u64;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                acc ^= other.data[k];
                bits &= bits - 1;
            }
            *dst = acc;
        }
        Ok(out)
    }

    /// Matrix–vector product with the vector packed as a word (bit `j` = component `j`).
    pub fn mul_vec(&self, v: u64) -> u64 {
        self.data.iter().enumerate().fold(0, |acc, (i, &w)| {
            acc | (((w & v).count_ones() as u64 & 1) << i)
        })
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows).expect("transpose of a valid matrix");
        assert!(self.rows <= MAX_COLS, "transpose needs at most 64 rows");
        for (i, &w) in self.data.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                out.data[j] |= 1 << i;
                bits &= bits - 1;
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols)?;
        for i in 0..self.rows {
            out.data[i] = self.data[i] | (other.data[i] << self.cols);
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                op: "vstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Copies the `rows × cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<Self> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(Error::DimensionMismatch {
                op: "block",
                left: self.shape(),
                right: (r0 + rows, c0 + cols),
            });
        }
        let mut out = Self::zeros(rows, cols)?;
        let mask = col_mask(cols);
        for i in 0..rows {
            out.data[i] = (self.data[r0 + i] >> c0) & mask;
        }
        Ok(out)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in &mut self.data {
            let x = ((*w >> a) ^ (*w >> b)) & 1;
            *w ^= (x << a) | (x << b);
        }
    }

    /// row[dst] ^= row[src]
    pub fn add_row(&mut self, src: usize, dst: usize) {
        let r = self.data[src];
        self.data[dst] ^= r;
    }

    /// col[dst] ^= col[src]
    pub fn add_col(&mut self, src: usize, dst: usize) {
        for w in &mut self.data {
            *w ^= ((*w >> src) & 1) << dst;
        }
    }

    /// Row echelon form in place; returns the pivot columns.
    fn eliminate(&mut self, reduced: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            let start = if reduced { 0 } else { r + 1 };
            for i in start..self.rows {
                if i != r && self.get(i, c) {
                    self.add_row(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate(false).len()
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if 2 * n > MAX_COLS {
            return Err(Error::InvalidShape {
                rows: n,
                cols: n,
                reason: "inverse supports at most 32x32",
            });
        }
        let mut aug = self.hstack(&Self::identity(n)?)?;
        let pivots = aug.eliminate(true);
        let rank = pivots.iter().take_while(|&&c| c < n).count();
        if rank < n {
            return Err(Error::NotInvertible { rank, size: n });
        }
        aug.block(0, n, n, n)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `P M Pᵀ` for the permutation matrix sending basis `i` to `perm[i]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<Self> {
        if !self.is_square() || perm.len() != self.rows {
            return Err(Error::LengthMismatch(perm.len(), self.rows));
        }
        let mut out = Self::zeros(self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set(perm[i], perm[j], true);
                }
            }
        }
        Ok(out)
    }

    /// Row-major entries as a bit sequence; used for lexicographic ordering.
    pub fn row_major_bits(&self) -> Vec<u8> {
        self.to_rows().into_iter().flatten().collect()
    }
}

impl Add for &Gf2Matrix {
    type Output = Gf2Matrix;

    fn add(self, rhs: &Gf2Matrix) -> Gf2Matrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &Gf2Matrix {
    type Output = Gf2Matrix;

    fn mul(self, rhs: &Gf2Matrix) -> Gf2Matrix {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Matrix {}x{} ", self.rows, self.cols)?;
        f.debug_list()
            .entries(
                self.to_rows()
                    .iter()
                    .map(|r| r.iter().map(|b| char::from(b'0' + b)).collect::<String>()),
            )
            .finish()
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let s: Vec<String> = row.iter().map(|b| b.to_string()).collect();
            write!(f, "{}", s.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<Vec<u8>>,
}

impl Serialize for Gf2Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            data: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gf2Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(d)?;
        let m = Gf2Matrix::from_rows(&raw.data).map_err(D::Error::custom)?;
        if m.shape() != (raw.rows, raw.cols) {
            return Err(D::Error::custom(format!(
                "declared shape {}x{} but data is {}x{}",
                raw.rows, raw.cols, m.rows, m.cols
            )));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b_field() -> Gf2Matrix {
        Gf2Matrix::from_rows(&[[1, 1, 1], [1, 1, 0], [1, 0, 0]]).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let b = b_field();
        let i3 = Gf2Matrix::identity(3).unwrap();
        assert_eq!(&i3 * &b, b);
        assert_eq!(&b * &i3, b);
    }

    #[test]
    fn self_sum_vanishes() {
        let b = b_field();
        assert!((&b + &b).is_zero());
    }

    #[test]
    fn field_b_is_symmetric() {
        assert!(b_field().is_symmetric());
        let b_group = Gf2Matrix::from_rows(&[[0, 1, 1], [0, 0, 1], [1, 0, 0]]).unwrap();
        assert!(!b_group.is_symmetric());
    }

    #[test]
    fn shape_errors_name_both_shapes() {
        let a = Gf2Matrix::zeros(2, 3).unwrap();
        let b = Gf2Matrix::zeros(2, 3).unwrap();
        let err = a.try_mul(&b).unwrap_err();
        assert!(err.to_string().contains("(2, 3) vs (2, 3)"), "{err}");
        let c = Gf2Matrix::zeros(3, 2).unwrap();
        assert!(matches!(
            a.try_add(&c),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Gf2Matrix::zeros(0, 1).is_err());
        assert!(Gf2Matrix::zeros(1, 65).is_err());
    }

    #[test]
    fn inverse_examples() {
        let i3 = Gf2Matrix::identity(3).unwrap();
        assert_eq!(i3.inverse().unwrap(), i3);

        let r_group = Gf2Matrix::from_rows(&[[0, 0, 1], [0, 1, 0], [1, 0, 0]]).unwrap();
        assert_eq!(r_group.inverse().unwrap(), r_group);

        let singular = Gf2Matrix::from_rows(&[[1, 1], [1, 1]]).unwrap();
        match singular.inverse() {
            Err(Error::NotInvertible { rank, .. }) => assert_eq!(rank, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn blocks_round_trip() {
        let b = b_field();
        let i3 = Gf2Matrix::identity(3).unwrap();
        let z = Gf2Matrix::zeros(3, 3).unwrap();
        let c = Gf2Matrix::from_blocks(&b, &i3, &i3, &z).unwrap();
        assert_eq!(c.shape(), (6, 6));
        assert_eq!(c.block(0, 0, 3, 3).unwrap(), b);
        assert_eq!(c.block(0, 3, 3, 3).unwrap(), i3);
        assert_eq!(c.block(3, 0, 3, 3).unwrap(), i3);
        assert!(c.block(3, 3, 3, 3).unwrap().is_zero());
    }

    #[test]
    fn mul_vec_matches_column_extraction() {
        let b = b_field();
        for j in 0..3 {
            assert_eq!(b.mul_vec(1 << j), b.col_word(j));
        }
    }

    #[test]
    fn col_ops_match_transposed_row_ops() {
        let b = Gf2Matrix::from_rows(&[[0, 1, 1], [0, 0, 1], [1, 0, 0]]).unwrap();
        let mut x = b.clone();
        x.add_col(0, 2);
        x.swap_cols(0, 1);
        let mut y = b.transpose();
        y.add_row(0, 2);
        y.swap_rows(0, 1);
        assert_eq!(x, y.transpose());
    }

    #[test]
    fn json_form() {
        let b = b_field();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"rows":3,"cols":3,"data":[[1,1,1],[1,1,0],[1,0,0]]}"#);
        let back: Gf2Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
        let bad = r#"{"rows":2,"cols":3,"data":[[1,1,1],[1,1,0],[1,0,0]]}"#;
        assert!(serde_json::from_str::<Gf2Matrix>(bad).is_err());
    }
}
