//! Cyclic generation of complete MUB sets.
//!
//! A valid triple `(B, R, A)` determines the symplectic generator
//!
//! ```text
//! C = [[B + A R⁻¹,  R + B A + A R⁻¹ A],
//!      [R⁻¹,        R⁻¹ A           ]]
//! ```
//!
//! whose powers applied to the seed `G₀ = (I; G₀ˣ)` give the `d + 1` class
//! generators `G_j = C^j G₀`. Symplectic vectors use the `(z; x)` layout and
//! the form `J = [[0, I], [I, 0]]`.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entanglement::StructureVector;
use crate::error::{Error, Result};
use crate::gf2::{self, Gf2Matrix, Gf2Poly};
use crate::pauli::{symplectic_product, SymplecticVector};

/// Largest qubit count handled by the cyclic construction (2n ≤ 32 columns).
pub const MAX_N: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorTriple {
    pub b: Gf2Matrix,
    pub r: Gf2Matrix,
    pub a: Gf2Matrix,
}

impl GeneratorTriple {
    pub fn new(b: Gf2Matrix, r: Gf2Matrix, a: Gf2Matrix) -> Result<Self> {
        let t = Self { b, r, a };
        t.check_shapes()?;
        Ok(t)
    }

    fn check_shapes(&self) -> Result<usize> {
        if !self.b.is_square() {
            return Err(Error::NotSquare {
                rows: self.b.rows(),
                cols: self.b.cols(),
            });
        }
        for m in [&self.r, &self.a] {
            if m.shape() != self.b.shape() {
                return Err(Error::DimensionMismatch {
                    op: "generator triple",
                    left: self.b.shape(),
                    right: m.shape(),
                });
            }
        }
        let n = self.b.rows();
        if n > MAX_N {
            return Err(Error::TooManyQubits {
                what: "cyclic construction",
                n,
                max: MAX_N,
            });
        }
        Ok(n)
    }

    pub fn n(&self) -> usize {
        self.b.rows()
    }

    /// Field-based triple `(B, I, 0)`.
    pub fn field(b: Gf2Matrix) -> Result<Self> {
        let n = b.rows();
        Self::new(b, Gf2Matrix::identity(n)?, Gf2Matrix::zeros(n, n)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: Option<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(
                f,
                "  [{}] {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name
            )?;
            if let Some(d) = &c.detail {
                write!(f, ": {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub mod checks {
    pub const R_SYMMETRIC: &str = "R symmetric";
    pub const BR_SYMMETRIC: &str = "BR symmetric";
    pub const A_SYMMETRIC: &str = "A symmetric";
    pub const R_INVERTIBLE: &str = "R invertible";
    pub const FIBONACCI_INDEX: &str = "Fibonacci index of char poly(B) = 2^n + 1";
    pub const SYMPLECTIC: &str = "C symplectic";
    pub const ORDER: &str = "C has order 2^n + 1";
    pub const SEED_ABELIAN: &str = "seed X-part symmetric";
    pub const CLASS_COUNT: &str = "class count = d + 1";
    pub const ABELIAN: &str = "(i) classes abelian";
    pub const RANK: &str = "(ii) classes have rank n";
    pub const DISJOINT: &str = "(iii) classes pairwise intersect trivially";
    pub const COVER: &str = "(iv) union covers all d^2 - 1 nonzero vectors";
}

pub fn validate_triple(t: &GeneratorTriple) -> ValidationReport {
    let mut report = ValidationReport::default();
    if let Err(e) = t.check_shapes() {
        report.push("shapes", false, Some(e.to_string()));
        return report;
    }
    let n = t.n();
    report.push(checks::R_SYMMETRIC, t.r.is_symmetric(), None);
    report.push(checks::BR_SYMMETRIC, (&t.b * &t.r).is_symmetric(), None);
    let a_sym = t.a.is_symmetric();
    let a_detail = (!a_sym).then(|| {
        let (i, j) = first_asymmetry(&t.a).expect("asymmetric");
        format!("A[{i}][{j}] != A[{j}][{i}]")
    });
    report.push(checks::A_SYMMETRIC, a_sym, a_detail);
    match t.r.inverse() {
        Ok(_) => report.push(checks::R_INVERTIBLE, true, None),
        Err(e) => report.push(checks::R_INVERTIBLE, false, Some(e.to_string())),
    }
    let target = (1usize << n) + 1;
    let cp = gf2::char_poly(&t.b).expect("square");
    match gf2::fibonacci_index(&cp, None) {
        Ok(idx) => report.push(
            checks::FIBONACCI_INDEX,
            idx == target,
            Some(format!("char poly {cp}, index {idx}, required {target}")),
        ),
        Err(e) => report.push(
            checks::FIBONACCI_INDEX,
            false,
            Some(format!("char poly {cp}: {e}")),
        ),
    }
    report
}

fn first_asymmetry(m: &Gf2Matrix) -> Option<(usize, usize)> {
    (0..m.rows())
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .find(|&(i, j)| m.get(i, j) != m.get(j, i))
}

/// Evaluates the block formula for `C` without checking validity. Needs `R` invertible.
pub fn generator_matrix(t: &GeneratorTriple) -> Result<Gf2Matrix> {
    t.check_shapes()?;
    let (b, r, a) = (&t.b, &t.r, &t.a);
    let r_inv = r.inverse()?;
    let a_rinv = a * &r_inv;
    let tl = b + &a_rinv;
    let tr = &(r + &(b * a)) + &(&a_rinv * a);
    let br = &r_inv * a;
    Gf2Matrix::from_blocks(&tl, &tr, &r_inv, &br)
}

pub fn symplectic_form(n: usize) -> Result<Gf2Matrix> {
    let z = Gf2Matrix::zeros(n, n)?;
    let i = Gf2Matrix::identity(n)?;
    Gf2Matrix::from_blocks(&z, &i, &i, &z)
}

/// First nonzero entry of `CᵀJC − J`, or `None` when `C` is symplectic.
pub fn symplectic_violation(c: &Gf2Matrix) -> Result<Option<(usize, usize)>> {
    if !c.is_square() || !c.rows().is_multiple_of(2) {
        return Err(Error::InvalidShape {
            rows: c.rows(),
            cols: c.cols(),
            reason: "symplectic matrices are square of even size",
        });
    }
    let j = symplectic_form(c.rows() / 2)?;
    let diff = &(&(&c.transpose() * &j) * c) + &j;
    Ok((0..diff.rows()).find_map(|r| {
        (diff.row_word(r) != 0).then(|| (r, diff.row_word(r).trailing_zeros() as usize))
    }))
}

pub fn is_symplectic(c: &Gf2Matrix) -> bool {
    matches!(symplectic_violation(c), Ok(None))
}

/// Symplectic transvection `x ↦ x + ⟨x, v⟩ v`.
pub fn transvection(n: usize, v: u64) -> Result<Gf2Matrix> {
    let mut m = Gf2Matrix::identity(2 * n)?;
    let sv = SymplecticVector::from_word(n, v)?;
    for k in 0..2 * n {
        let ek = SymplecticVector::from_word(n, 1 << k)?;
        if symplectic_product(&ek, &sv)? {
            for r in 0..2 * n {
                if (v >> r) & 1 == 1 {
                    m.set(r, k, !m.get(r, k));
                }
            }
        }
    }
    Ok(m)
}

/// Product of `8n` random transvections. Transvections generate the whole
/// symplectic group, so this samples it without touching the gate set.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Gf2Matrix> {
    let mut m = Gf2Matrix::identity(2 * n)?;
    let full = if 2 * n >= 64 {
        u64::MAX
    } else {
        (1u64 << (2 * n)) - 1
    };
    for _ in 0..8 * n {
        let v = loop {
            let v = rng.gen::<u64>() & full;
            if v != 0 {
                break v;
            }
        };
        m = &transvection(n, v)? * &m;
    }
    Ok(m)
}

/// Multiplicative order of a square matrix, searching up to `limit`.
pub fn matrix_order(c: &Gf2Matrix, limit: usize) -> Option<usize> {
    let id = Gf2Matrix::identity(c.rows()).ok()?;
    let mut p = c.clone();
    for k in 1..=limit {
        if p == id {
            return Some(k);
        }
        p = &p * c;
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSource {
    Triple(GeneratorTriple),
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicGenerator {
    n: usize,
    c: Gf2Matrix,
    seed_x: Gf2Matrix,
    source: GeneratorSource,
}

impl CyclicGenerator {
    /// `build_C`: validates the triple and assembles `C` with the standard seed.
    pub fn from_triple(t: &GeneratorTriple) -> Result<Self> {
        let report = validate_triple(t);
        if !report.is_valid() {
            return Err(Error::InvalidTriple(report));
        }
        let n = t.n();
        Ok(Self {
            n,
            c: generator_matrix(t)?,
            seed_x: Gf2Matrix::zeros(n, n)?,
            source: GeneratorSource::Triple(t.clone()),
        })
    }

    /// A generator given directly by its `2n × 2n` matrix. Validity is left to
    /// [`validate_generator`] and the partition checks.
    pub fn from_explicit(c: Gf2Matrix) -> Result<Self> {
        if !c.is_square() || !c.rows().is_multiple_of(2) {
            return Err(Error::InvalidShape {
                rows: c.rows(),
                cols: c.cols(),
                reason: "generator must be square of even size",
            });
        }
        let n = c.rows() / 2;
        if n > MAX_N {
            return Err(Error::TooManyQubits {
                what: "cyclic construction",
                n,
                max: MAX_N,
            });
        }
        Ok(Self {
            n,
            c,
            seed_x: Gf2Matrix::zeros(n, n)?,
            source: GeneratorSource::Explicit,
        })
    }

    /// Replaces the seed's X-part `G₀ˣ`.
    pub fn with_seed_x(mut self, seed_x: Gf2Matrix) -> Result<Self> {
        if seed_x.shape() != (self.n, self.n) {
            return Err(Error::DimensionMismatch {
                op: "seed X-part",
                left: (self.n, self.n),
                right: seed_x.shape(),
            });
        }
        self.seed_x = seed_x;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        1 << self.n
    }

    pub fn c(&self) -> &Gf2Matrix {
        &self.c
    }

    pub fn seed_x(&self) -> &Gf2Matrix {
        &self.seed_x
    }

    pub fn source(&self) -> &GeneratorSource {
        &self.source
    }

    pub fn triple(&self) -> Option<&GeneratorTriple> {
        match &self.source {
            GeneratorSource::Triple(t) => Some(t),
            GeneratorSource::Explicit => None,
        }
    }

    /// `G₀ = (I; G₀ˣ)`.
    pub fn seed(&self) -> Gf2Matrix {
        Gf2Matrix::identity(self.n)
            .and_then(|i| i.vstack(&self.seed_x))
            .expect("seed shape")
    }

    pub fn has_standard_seed(&self) -> bool {
        self.seed_x.is_zero()
    }
}

pub fn build_c(t: &GeneratorTriple) -> Result<CyclicGenerator> {
    CyclicGenerator::from_triple(t)
}

/// Symplecticity, exact order `d + 1`, and an abelian seed class.
pub fn validate_generator(g: &CyclicGenerator) -> ValidationReport {
    let mut report = match g.triple() {
        Some(t) => validate_triple(t),
        None => ValidationReport::default(),
    };
    match symplectic_violation(&g.c) {
        Ok(None) => report.push(checks::SYMPLECTIC, true, None),
        Ok(Some((r, c))) => report.push(
            checks::SYMPLECTIC,
            false,
            Some(format!("(C^T J C - J)[{r}][{c}] != 0")),
        ),
        Err(e) => report.push(checks::SYMPLECTIC, false, Some(e.to_string())),
    }
    let target = g.d() + 1;
    let order = matrix_order(&g.c, target);
    report.push(
        checks::ORDER,
        order == Some(target),
        Some(match order {
            Some(k) => format!("order {k}, required {target}"),
            None => format!("C^k != I for all k <= {target}"),
        }),
    );
    report.push(checks::SEED_ABELIAN, g.seed_x.is_symmetric(), None);
    report
}

/// `C^j` by iterated multiplication.
pub fn c_power(g: &CyclicGenerator, j: usize) -> Gf2Matrix {
    let mut p = Gf2Matrix::identity(2 * g.n).expect("n >= 1");
    for _ in 0..j {
        p = &p * &g.c;
    }
    p
}

/// Fibonacci polynomial `F_k` evaluated at `B`, with `F_{-1} = 1`.
fn fib_at(b: &Gf2Matrix, k: isize) -> Gf2Matrix {
    let p = if k < 0 {
        Gf2Poly::one()
    } else {
        gf2::fibonacci_poly(k as usize)
    };
    gf2::poly_eval_at_matrix(&p, b).expect("square")
}

/// `C^j` from the Fibonacci-polynomial closed form.
pub fn c_power_closed_form(t: &GeneratorTriple, j: usize) -> Result<Gf2Matrix> {
    t.check_shapes()?;
    let (b, r, a) = (&t.b, &t.r, &t.a);
    let r_inv = r.inverse()?;
    let j = j as isize;
    let f_next = fib_at(b, j + 1);
    let f_cur = fib_at(b, j);
    let f_prev = fib_at(b, j - 1);
    let a_rinv = a * &r_inv;
    // F_j A + F_{j-1} R appears in both right-hand blocks
    let inner = &(&f_cur * a) + &(&f_prev * r);
    let tl = &f_next + &(&a_rinv * &f_cur);
    let tr = &(&(&f_next * a) + &(&f_cur * r)) + &(&a_rinv * &inner);
    let bl = &r_inv * &f_cur;
    let br = &r_inv * &inner;
    Gf2Matrix::from_blocks(&tl, &tr, &bl, &br)
}

/// `G_j = C^j G₀` (product form).
pub fn generator_j(g: &CyclicGenerator, j: usize) -> Gf2Matrix {
    &c_power(g, j) * &g.seed()
}

/// Normalized closed form `(F_{j+1}(B) F_j(B)⁻¹ R + A; I)` for the standard seed.
///
/// Spans the same class as [`generator_j`]; fails when `F_j(B)` is singular,
/// in which case callers fall back to the product form.
pub fn generator_j_closed_form(t: &GeneratorTriple, j: usize) -> Result<Gf2Matrix> {
    let n = t.check_shapes()?;
    let f_cur = fib_at(&t.b, j as isize);
    let f_inv = f_cur
        .inverse()
        .map_err(|_| Error::SingularFibonacci { j })?;
    let top = &(&(&fib_at(&t.b, j as isize + 1) * &f_inv) * &t.r) + &t.a;
    top.vstack(&Gf2Matrix::identity(n)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetType {
    Field,
    Group,
    Semigroup,
    Explicit,
    Unclassified,
}

impl fmt::Display for SetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Field => "field",
            Self::Group => "group",
            Self::Semigroup => "semigroup",
            Self::Explicit => "explicit",
            Self::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

pub fn classify_set_type(t: &GeneratorTriple) -> Result<SetType> {
    let report = validate_triple(t);
    if !report.is_valid() {
        return Err(Error::InvalidTriple(report));
    }
    if t.a.is_zero() {
        if gf2::in_polynomial_span(&t.r, &t.b)? {
            Ok(SetType::Field)
        } else {
            Ok(SetType::Group)
        }
    } else if gf2::semigroup_a_condition(&t.a, &t.b, &t.r)? {
        Ok(SetType::Semigroup)
    } else {
        Err(Error::UnclassifiedTriple)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MubClass {
    pub index: usize,
    pub generator: Gf2Matrix,
    /// The `2ⁿ − 1` nonzero vectors `G_j c`, ordered by `c` as an integer.
    pub elements: Vec<SymplecticVector>,
}

impl MubClass {
    pub fn from_generator(index: usize, generator: Gf2Matrix) -> Result<Self> {
        if generator.rows() != 2 * generator.cols() {
            return Err(Error::InvalidShape {
                rows: generator.rows(),
                cols: generator.cols(),
                reason: "class generator must be 2n x n",
            });
        }
        let n = generator.cols();
        let elements = (1u64..(1u64 << n))
            .map(|c| SymplecticVector::from_word(n, generator.mul_vec(c)))
            .collect::<Result<_>>()?;
        Ok(Self {
            index,
            generator,
            elements,
        })
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    /// `Gᶻᵀ Gˣ` symmetric, i.e. the generator columns pairwise commute.
    pub fn is_abelian(&self) -> bool {
        let n = self.n();
        let gz = self.generator.block(0, 0, n, n).expect("shape");
        let gx = self.generator.block(n, 0, n, n).expect("shape");
        (&gz.transpose() * &gx).is_symmetric()
    }

    pub fn generator_columns(&self) -> Vec<SymplecticVector> {
        let n = self.n();
        (0..n)
            .map(|k| SymplecticVector::from_word(n, self.generator.col_word(k)).expect("shape"))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicMubSet {
    pub generator: CyclicGenerator,
    pub classes: Vec<MubClass>,
    pub set_type: SetType,
    pub structure: Option<StructureVector>,
}

impl CyclicMubSet {
    pub fn n(&self) -> usize {
        self.generator.n()
    }

    pub fn d(&self) -> usize {
        self.generator.d()
    }
}

/// Builds the `d + 1` classes `G_j = C^j G₀`, `j = 0..d`.
pub fn build_classes(g: &CyclicGenerator) -> Result<CyclicMubSet> {
    let n = g.n();
    let mut classes = Vec::with_capacity(g.d() + 1);
    let mut gj = g.seed();
    for j in 0..=g.d() {
        let rank = gj.rank();
        if rank != n {
            return Err(Error::RankDeficientClass { j, rank, n });
        }
        let next = &g.c * &gj;
        classes.push(MubClass::from_generator(
            j,
            std::mem::replace(&mut gj, next),
        )?);
    }
    let set_type = match g.triple() {
        Some(t) => match classify_set_type(t) {
            Ok(k) => k,
            Err(Error::UnclassifiedTriple) => SetType::Unclassified,
            Err(e) => return Err(e),
        },
        None => SetType::Explicit,
    };
    Ok(CyclicMubSet {
        generator: g.clone(),
        classes,
        set_type,
        structure: None,
    })
}

/// The four combinatorial conditions for a complete MUB partition, checked
/// on the listed class elements as well as the generators.
pub fn validate_mub_partition(s: &CyclicMubSet) -> ValidationReport {
    let n = s.n();
    let d = s.d();
    let mut report = ValidationReport::default();

    report.push(
        checks::CLASS_COUNT,
        s.classes.len() == d + 1,
        Some(format!("{} classes, expected {}", s.classes.len(), d + 1)),
    );

    let mut abelian_witness = None;
    for class in &s.classes {
        if !class.is_abelian() {
            abelian_witness = Some(format!("class {}: G^zT G^x not symmetric", class.index));
            break;
        }
        let els = &class.elements;
        let clash = (0..els.len()).find_map(|i| {
            (i + 1..els.len()).find_map(|k| {
                matches!(symplectic_product(&els[i], &els[k]), Ok(true) | Err(_)).then(|| {
                    format!(
                        "class {}: {} and {} anticommute",
                        class.index, els[i], els[k]
                    )
                })
            })
        });
        if clash.is_some() {
            abelian_witness = clash;
            break;
        }
    }
    report.push(checks::ABELIAN, abelian_witness.is_none(), abelian_witness);

    let mut rank_witness = None;
    for class in &s.classes {
        let rank = class.generator.rank();
        if class.generator.shape() != (2 * n, n) || rank != n {
            rank_witness = Some(format!("class {}: generator rank {rank}", class.index));
            break;
        }
        let Ok(expected) = MubClass::from_generator(class.index, class.generator.clone()) else {
            rank_witness = Some(format!("class {}: malformed generator", class.index));
            break;
        };
        let mut listed = class.elements.clone();
        listed.sort();
        let mut want = expected.elements;
        want.sort();
        if listed != want {
            let odd = class
                .elements
                .iter()
                .find(|e| want.binary_search(e).is_err())
                .map(|e| e.to_string())
                .unwrap_or_else(|| "missing element".into());
            rank_witness = Some(format!(
                "class {}: elements differ from span of G_{} (e.g. {odd})",
                class.index, class.index
            ));
            break;
        }
    }
    report.push(checks::RANK, rank_witness.is_none(), rank_witness);

    let mut owner: HashMap<SymplecticVector, usize> = HashMap::new();
    let mut overlap = None;
    for class in &s.classes {
        for e in &class.elements {
            if e.is_zero() {
                overlap.get_or_insert_with(|| format!("class {} lists the identity", class.index));
                continue;
            }
            if let Some(&prev) = owner.get(e) {
                if prev != class.index {
                    overlap.get_or_insert_with(|| {
                        format!("{e} appears in classes {prev} and {}", class.index)
                    });
                }
            } else {
                owner.insert(*e, class.index);
            }
        }
    }
    report.push(checks::DISJOINT, overlap.is_none(), overlap);

    let total = d * d - 1;
    report.push(
        checks::COVER,
        owner.len() == total,
        Some(format!(
            "{} distinct nonzero vectors of {total}",
            owner.len()
        )),
    );
    report
}

/// Full algebraic certification: generator checks plus partition checks.
pub fn validate_set(s: &CyclicMubSet) -> ValidationReport {
    let mut report = validate_generator(&s.generator);
    report.extend(validate_mub_partition(s));
    report
}
