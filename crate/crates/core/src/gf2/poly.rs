//! Polynomials over Z₂, packed 64 coefficients per word.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Coefficients in ascending degree. Trailing zero words are trimmed, so the
/// zero polynomial has an empty word vector and no degree.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Gf2Poly {
    words: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Self { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self { words: vec![1] }
    }

    pub fn x() -> Self {
        Self { words: vec![2] }
    }

    pub fn monomial(k: usize) -> Self {
        let mut p = Self::zero();
        p.set_coeff(k, true);
        p
    }

    pub fn from_coeffs(coeffs: &[u8]) -> Result<Self> {
        let mut p = Self::zero();
        for (i, &c) in coeffs.iter().enumerate() {
            match c {
                0 => {}
                1 => p.set_coeff(i, true),
                _ => return Err(Error::Parse(format!("coefficient {i} = {c} is not a bit"))),
            }
        }
        Ok(p)
    }

    /// `x^e1 + x^e2 + ...`; repeated exponents cancel.
    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = Self::zero();
        for &e in exps {
            let c = p.coeff(e);
            p.set_coeff(e, !c);
        }
        p
    }

    /// Low `bits` coefficients taken from the bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut p = Self { words: vec![mask] };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn set_coeff(&mut self, i: usize, value: bool) {
        let (w, b) = (i / 64, i % 64);
        if value {
            if self.words.len() <= w {
                self.words.resize(w + 1, 0);
            }
            self.words[w] |= 1 << b;
        } else if w < self.words.len() {
            self.words[w] &= !(1 << b);
            self.trim();
        }
    }

    pub fn coeffs(&self) -> Vec<u8> {
        match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|i| self.coeff(i) as u8).collect(),
        }
    }

    /// Evaluation at x ∈ {0, 1}.
    pub fn eval_bit(&self, x: bool) -> bool {
        if x {
            self.words.iter().map(|w| w.count_ones()).sum::<u32>() & 1 == 1
        } else {
            self.coeff(0)
        }
    }

    pub fn shl(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (ws, bs) = (k / 64, k % 64);
        let mut words = vec![0u64; self.words.len() + ws + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + ws] |= w << bs;
            if bs != 0 {
                words[i + ws + 1] |= w >> (64 - bs);
            }
        }
        let mut p = Self { words };
        p.trim();
        p
    }

    fn xor_assign(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        self.trim();
    }

    /// Long division: returns `(quotient, remainder)` with `deg r < deg d`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::DegenerateModulus)?;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot.set_coeff(shift, true);
            rem.xor_assign(&divisor.shl(shift));
        }
        Ok((quot, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.div_rem(divisor)?.1)
    }

    pub fn divides(&self, other: &Self) -> Result<bool> {
        Ok(other.rem(self)?.is_zero())
    }
}

impl Add for &Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: &Gf2Poly) -> Gf2Poly {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl Mul for &Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: &Gf2Poly) -> Gf2Poly {
        let mut out = Gf2Poly::zero();
        if let Some(d) = self.degree() {
            for i in 0..=d {
                if self.coeff(i) {
                    out.xor_assign(&rhs.shl(i));
                }
            }
        }
        out
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else {
            return write!(f, "0");
        };
        let terms: Vec<String> = (0..=d)
            .rev()
            .filter(|&i| self.coeff(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    coeffs: Vec<u8>,
}

impl Serialize for Gf2Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            coeffs: self.coeffs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gf2Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PolyJson::deserialize(d)?;
        Gf2Poly::from_coeffs(&raw.coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_has_no_degree() {
        assert_eq!(Gf2Poly::zero().degree(), None);
        assert_eq!(Gf2Poly::one().degree(), Some(0));
        assert_eq!(Gf2Poly::from_coeffs(&[0, 0, 0]).unwrap(), Gf2Poly::zero());
    }

    #[test]
    fn multiplication_in_characteristic_two() {
        // (x+1)^2 = x^2 + 1
        let p = Gf2Poly::from_exponents(&[1, 0]);
        assert_eq!(&p * &p, Gf2Poly::from_exponents(&[2, 0]));
    }

    #[test]
    fn long_division() {
        let a = Gf2Poly::from_exponents(&[4, 2, 0]);
        let d = Gf2Poly::from_exponents(&[2, 1, 0]);
        let (q, r) = a.div_rem(&d).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, d);
        assert!(Gf2Poly::one().div_rem(&Gf2Poly::zero()).is_err());
    }

    #[test]
    fn shifts_cross_word_boundaries() {
        let p = Gf2Poly::from_exponents(&[63, 1]);
        let q = p.shl(70);
        assert_eq!(q.degree(), Some(133));
        assert!(q.coeff(71));
        let (quot, rem) = q.div_rem(&Gf2Poly::monomial(70)).unwrap();
        assert!(rem.is_zero());
        assert_eq!(quot, p);
    }

    #[test]
    fn display_and_json() {
        let p = Gf2Poly::from_exponents(&[3, 1, 0]);
        assert_eq!(p.to_string(), "x^3 + x + 1");
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"coeffs":[1,1,0,1]}"#
        );
        let back: Gf2Poly = serde_json::from_str(r#"{"coeffs":[1,1,0,1,0]}"#).unwrap();
        assert_eq!(back, p);
    }
}
