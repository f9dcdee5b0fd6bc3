//! Generalized Pauli operators `ZX(a)` on n qubits.
//!
//! A symplectic vector `a = (a^z_1..a^z_n; a^x_1..a^x_n)` labels the operator
//!
//! ```text
//! ZX(a) = ⊗_k (-i)^{a^z_k a^x_k} σ_z^{a^z_k} σ_x^{a^x_k}
//! ```
//!
//! with `σ_z = |1⟩⟨1| − |0⟩⟨0|` and `σ_x = |0⟩⟨1| + |1⟩⟨0|`. The per-qubit
//! factor `(-i)` on Y-type sites makes the operator Hermitian.
//!
//! Qubit `k` is the `k`-th tensor factor, i.e. the most significant bit of a
//! computational basis index is qubit 0.

use std::fmt;
use std::str::FromStr;

use crate::dense::{CMatrix, C64};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;
pub const MAX_DENSE_QUBITS: usize = 10;

#[inline]
fn qubit_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A `2n`-bit vector, stored as its z-half and x-half. Bit `k` of each half is qubit `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticVector {
    n: usize,
    z: u64,
    x: u64,
}

impl SymplecticVector {
    pub fn new(n: usize, z: u64, x: u64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                what: "symplectic vector",
                n,
                max: MAX_QUBITS,
            });
        }
        let mask = qubit_mask(n);
        if z & !mask != 0 || x & !mask != 0 {
            return Err(Error::Parse(format!("bits beyond qubit count {n}")));
        }
        Ok(Self { n, z, x })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, 0, 0)
    }

    /// Parses `(a^z; a^x)` given as a flat 0/1 slice of even length.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return Err(Error::OddLength(bits.len()));
        }
        let n = bits.len() / 2;
        let mut z = 0;
        let mut x = 0;
        for k in 0..n {
            z |= u64::from(bits[k] & 1) << k;
            x |= u64::from(bits[n + k] & 1) << k;
        }
        Self::new(n, z, x)
    }

    /// Inverse of [`SymplecticVector::to_word`]: bits `0..n` are z, `n..2n` are x.
    pub fn from_word(n: usize, word: u64) -> Result<Self> {
        if n > 32 {
            return Err(Error::TooManyQubits {
                what: "packed symplectic word",
                n,
                max: 32,
            });
        }
        let mask = qubit_mask(n);
        Self::new(n, word & mask, (word >> n) & mask)
    }

    pub fn to_word(&self) -> u64 {
        assert!(self.n <= 32, "packed words hold at most 32 qubits");
        self.z | (self.x << self.n)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.n)
            .map(|k| ((self.z >> k) & 1) as u8)
            .chain((0..self.n).map(|k| ((self.x >> k) & 1) as u8))
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn is_zero(&self) -> bool {
        self.z == 0 && self.x == 0
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        check_len(self, other)?;
        Ok(Self {
            n: self.n,
            z: self.z ^ other.z,
            x: self.x ^ other.x,
        })
    }
}

fn check_len(a: &SymplecticVector, b: &SymplecticVector) -> Result<()> {
    if a.n != b.n {
        Err(Error::LengthMismatch(2 * a.n, 2 * b.n))
    } else {
        Ok(())
    }
}

/// `a^z·b^x + a^x·b^z mod 2`; zero iff `ZX(a)` and `ZX(b)` commute.
pub fn symplectic_product(a: &SymplecticVector, b: &SymplecticVector) -> Result<bool> {
    Ok(qubitwise_commutation_vector(a, b)?.count_ones() & 1 == 1)
}

/// Per-qubit anticommutation indicators: bit `k` is `a^z_k b^x_k + a^x_k b^z_k`.
pub fn qubitwise_commutation_vector(a: &SymplecticVector, b: &SymplecticVector) -> Result<u64> {
    check_len(a, b)?;
    Ok((a.z & b.x) ^ (a.x & b.z))
}

/// `i^phase_exp · ⊗_k σ_z^{z_k} σ_x^{x_k}` (bare product, no per-qubit phases).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliOp {
    vector: SymplecticVector,
    phase_exp: u8,
}

impl PauliOp {
    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self {
            vector: SymplecticVector::zero(n)?,
            phase_exp: 0,
        })
    }

    /// The Hermitian operator `ZX(a)`.
    pub fn from_vector(a: &SymplecticVector) -> Self {
        Self {
            vector: *a,
            phase_exp: canonical_phase(a),
        }
    }

    pub fn with_phase(a: &SymplecticVector, phase_exp: u8) -> Self {
        Self {
            vector: *a,
            phase_exp: phase_exp % 4,
        }
    }

    pub fn n(&self) -> usize {
        self.vector.n
    }

    pub fn vector(&self) -> &SymplecticVector {
        &self.vector
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn is_identity(&self) -> bool {
        self.vector.is_zero() && self.phase_exp == 0
    }

    /// Phase relative to the Hermitian representative of the same vector.
    pub fn relative_phase(&self) -> u8 {
        (self.phase_exp + 4 - canonical_phase(&self.vector)) % 4
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        Ok(!symplectic_product(&self.vector, &other.vector)?)
    }

    /// Exact operator product, phase included.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let v = self.vector.xor(&other.vector)?;
        // σ_x^{x1} σ_z^{z2} = (-1)^{x1·z2} σ_z^{z2} σ_x^{x1}
        let swaps = (self.vector.x & other.vector.z).count_ones() as u8;
        Ok(Self {
            vector: v,
            phase_exp: (self.phase_exp + other.phase_exp + 2 * (swaps % 2)) % 4,
        })
    }

    /// Dense `2ⁿ × 2ⁿ` matrix; at most [`MAX_DENSE_QUBITS`] qubits.
    pub fn dense_matrix(&self) -> Result<CMatrix> {
        let n = self.n();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                what: "dense Pauli matrix",
                n,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << n;
        let to_index_mask = |m: u64| -> usize {
            (0..n)
                .filter(|k| (m >> k) & 1 == 1)
                .map(|k| 1usize << (n - 1 - k))
                .sum()
        };
        let zmask = to_index_mask(self.vector.z);
        let xmask = to_index_mask(self.vector.x);
        let global = i_pow(self.phase_exp);
        let mut m = CMatrix::zeros(dim);
        for col in 0..dim {
            let row = col ^ xmask;
            // σ_z = diag(-1, +1): a sign for every z-site whose bit is 0
            let neg = (zmask & !row).count_ones() & 1 == 1;
            m.set(row, col, if neg { -global } else { global });
        }
        Ok(m)
    }
}

pub(crate) fn canonical_phase(a: &SymplecticVector) -> u8 {
    // (-i)^w = i^{3w}
    ((3 * (a.z & a.x).count_ones()) % 4) as u8
}

pub(crate) fn i_pow(k: u8) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `zx_from_vector`: the Hermitian Pauli operator labelled by `a`.
pub fn zx(a: &SymplecticVector) -> PauliOp {
    PauliOp::from_vector(a)
}

impl fmt::Display for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.n {
            let c = match ((self.z >> k) & 1, (self.x >> k) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'Z',
                (0, 1) => 'X',
                _ => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for SymplecticVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        let (mut z, mut x) = (0u64, 0u64);
        for (k, c) in s.chars().enumerate() {
            if k >= MAX_QUBITS {
                break;
            }
            match c {
                'I' => {}
                'Z' => z |= 1 << k,
                'X' => x |= 1 << k,
                'Y' => {
                    z |= 1 << k;
                    x |= 1 << k;
                }
                _ => return Err(Error::Parse(format!("invalid Pauli letter `{c}` in `{s}`"))),
            }
        }
        Self::new(n, z, x)
    }
}

/// Letters over {I,X,Y,Z} with an optional leading tag `i`, `-`, `-i` giving
/// the phase relative to the Hermitian representative (Y = the Hermitian σ_y type).
impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.relative_phase() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{tag}{}", self.vector)
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (rel, body) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        let v: SymplecticVector = body.parse()?;
        Ok(Self::with_phase(&v, canonical_phase(&v) + rel))
    }
}
