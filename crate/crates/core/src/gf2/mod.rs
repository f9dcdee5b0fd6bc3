//! Exact linear and polynomial algebra over Z₂.

mod matrix;
mod poly;

pub use matrix::{Gf2Matrix, MAX_COLS};
pub use poly::Gf2Poly;

use crate::error::{Error, Result};

fn require_square(m: &Gf2Matrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.rows())
    } else {
        Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

fn require_same_square(a: &Gf2Matrix, b: &Gf2Matrix, op: &'static str) -> Result<usize> {
    let n = require_square(a)?;
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op,
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(n)
}

/// Characteristic polynomial `det(xI + m)`.
///
/// Reduces `m` to upper Hessenberg form by similarity transforms and then
/// runs the standard Hessenberg determinant recurrence. Signs vanish mod 2.
pub fn char_poly(m: &Gf2Matrix) -> Result<Gf2Poly> {
    let n = require_square(m)?;
    let mut h = m.clone();
    for j in 0..n.saturating_sub(2) {
        let Some(p) = (j + 1..n).find(|&i| h.get(i, j)) else {
            continue;
        };
        if p != j + 1 {
            h.swap_rows(p, j + 1);
            h.swap_cols(p, j + 1);
        }
        for k in j + 2..n {
            if h.get(k, j) {
                h.add_row(j + 1, k);
                h.add_col(k, j + 1);
            }
        }
    }

    let mut p: Vec<Gf2Poly> = Vec::with_capacity(n + 1);
    p.push(Gf2Poly::one());
    for k in 1..=n {
        let lin = if h.get(k - 1, k - 1) {
            Gf2Poly::from_exponents(&[1, 0])
        } else {
            Gf2Poly::x()
        };
        let mut pk = &lin * &p[k - 1];
        // subdiagonal product h[i][i-1] * ... * h[k-1][k-2], built from the right
        let mut sub = true;
        for i in (1..k).rev() {
            sub &= h.get(i, i - 1);
            if !sub {
                break;
            }
            if h.get(i - 1, k - 1) {
                pk = &pk + &p[i - 1];
            }
        }
        p.push(pk);
    }
    Ok(p.pop().expect("n >= 1"))
}

/// Fibonacci polynomial `F_j` over Z₂: `F_0 = 0`, `F_1 = 1`, `F_{j+1} = x F_j + F_{j-1}`.
pub fn fibonacci_poly(j: usize) -> Gf2Poly {
    let (mut prev, mut cur) = (Gf2Poly::zero(), Gf2Poly::one());
    if j == 0 {
        return prev;
    }
    for _ in 1..j {
        let next = &cur.shl(1) + &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Default search bound `2^(deg p + 2)`.
pub fn default_index_bound(p: &Gf2Poly) -> usize {
    let d = p.degree().unwrap_or(0);
    1usize.checked_shl((d + 2) as u32).unwrap_or(usize::MAX)
}

/// Smallest `j ≥ 1` with `p | F_j`, searching up to `bound` (inclusive).
///
/// Runs the Fibonacci recurrence on residues mod `p`, reducing each step by
/// long division, so the working polynomials never exceed degree `deg p`.
pub fn fibonacci_index(p: &Gf2Poly, bound: Option<usize>) -> Result<usize> {
    match p.degree() {
        Some(d) if d >= 1 => {}
        _ => return Err(Error::DegenerateModulus),
    }
    let bound = bound.unwrap_or_else(|| default_index_bound(p));
    let (mut prev, mut cur) = (Gf2Poly::zero(), Gf2Poly::one());
    for j in 1..=bound {
        if cur.is_zero() {
            return Ok(j);
        }
        let next = (&cur.shl(1) + &prev).rem(p)?;
        prev = std::mem::replace(&mut cur, next);
    }
    Err(Error::IndexNotFound { bound })
}

/// `Σ pᵢ mⁱ` by Horner's rule.
pub fn poly_eval_at_matrix(p: &Gf2Poly, m: &Gf2Matrix) -> Result<Gf2Matrix> {
    let n = require_square(m)?;
    let id = Gf2Matrix::identity(n)?;
    let mut acc = Gf2Matrix::zeros(n, n)?;
    if let Some(d) = p.degree() {
        for i in (0..=d).rev() {
            acc = &acc * m;
            if p.coeff(i) {
                acc = &acc + &id;
            }
        }
    }
    Ok(acc)
}

/// `I, b, b², …, b^{n-1}`.
pub fn matrix_powers(b: &Gf2Matrix) -> Result<Vec<Gf2Matrix>> {
    let n = require_square(b)?;
    let mut out = Vec::with_capacity(n);
    let mut cur = Gf2Matrix::identity(n)?;
    for _ in 0..n {
        let next = &cur * b;
        out.push(std::mem::replace(&mut cur, next));
    }
    Ok(out)
}

/// Whether `r` lies in `span{I, b, …, b^{n−1}}`, i.e. `r = q(b)` for some `q`.
///
/// Solves the linear system whose columns are the flattened powers of `b`.
pub fn in_polynomial_span(r: &Gf2Matrix, b: &Gf2Matrix) -> Result<bool> {
    let n = require_same_square(r, b, "in_polynomial_span")?;
    let powers = matrix_powers(b)?;
    let mut system = Gf2Matrix::zeros(n * n, n + 1)?;
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for (k, pk) in powers.iter().enumerate() {
                system.set(row, k, pk.get(i, j));
            }
            system.set(row, n, r.get(i, j));
        }
    }
    let coeffs = system.block(0, 0, n * n, n)?;
    Ok(coeffs.rank() == system.rank())
}

/// True iff there is NO polynomial `q` (degree < n) and diagonal `D` with
/// `a = q(b)·r + D`. Only off-diagonal entries are compared since `D`
/// absorbs the diagonal.
pub fn semigroup_a_condition(a: &Gf2Matrix, b: &Gf2Matrix, r: &Gf2Matrix) -> Result<bool> {
    let n = require_same_square(a, b, "semigroup_a_condition")?;
    require_same_square(a, r, "semigroup_a_condition")?;
    if n >= 32 {
        return Err(Error::TooManyQubits {
            what: "semigroup_a_condition",
            n,
            max: 31,
        });
    }
    let basis: Vec<Gf2Matrix> = matrix_powers(b)?.iter().map(|p| p * r).collect();
    // Gray-code walk over all 2^n polynomials q; `acc` tracks q(b)·r + a.
    let mut acc = a.clone();
    let off_diag_zero = |m: &Gf2Matrix| (0..n).all(|i| m.row_word(i) & !(1u64 << i) == 0);
    if off_diag_zero(&acc) {
        return Ok(false);
    }
    for step in 1u64..(1u64 << n) {
        let flip = step.trailing_zeros() as usize;
        acc = &acc + &basis[flip];
        if off_diag_zero(&acc) {
            return Ok(false);
        }
    }
    Ok(true)
}
