//! Search for valid generator triples `(B, R, A)` of a requested set type.
//!
//! Exhaustive mode walks `B` row by row in lexicographic order of its
//! row-major bits, pruning on linear independence of the rows (a valid `B` has
//! `det B = 1`) and then testing the characteristic polynomial against the
//! precomputed set of degree-`n` polynomials with Fibonacci index `2ⁿ + 1`.
//! For each accepted `B` the symmetric `R` with `BR` symmetric form a linear
//! subspace, which is solved for directly rather than scanned.

use std::collections::HashSet;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{self, Gf2Matrix, Gf2Poly};
use crate::mub::{
    build_classes, classify_set_type, validate_mub_partition, CyclicGenerator, GeneratorTriple,
    SetType,
};

/// Largest `n` accepted by [`find_triples`]; the `R`-subspace solver packs the
/// `n(n+1)/2` symmetric unknowns into one word.
pub const MAX_SEARCH_N: usize = 10;

/// Largest `n` searched exhaustively by default.
pub const MAX_EXHAUSTIVE_N: usize = 6;

const HEURISTIC_ATTEMPTS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchKind {
    Field,
    Group,
    Semigroup,
}

impl SearchKind {
    pub const ALL: [SearchKind; 3] = [Self::Field, Self::Group, Self::Semigroup];

    pub fn set_type(self) -> SetType {
        match self {
            Self::Field => SetType::Field,
            Self::Group => SetType::Group,
            Self::Semigroup => SetType::Semigroup,
        }
    }
}

impl FromStr for SearchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "field" => Ok(Self::Field),
            "group" => Ok(Self::Group),
            "semigroup" => Ok(Self::Semigroup),
            other => Err(Error::Parse(format!(
                "unknown kind `{other}` (expected field, group or semigroup)"
            ))),
        }
    }
}

impl std::fmt::Display for SearchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.set_type().fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Heuristic,
}

#[derive(Clone, Debug)]
pub struct SearchQuery {
    pub n: usize,
    pub kind: SearchKind,
    pub limit: usize,
    pub time_budget: Option<Duration>,
    /// Only used in heuristic mode.
    pub seed: u64,
    /// `None` picks exhaustive for `n ≤ MAX_EXHAUSTIVE_N`.
    pub mode: Option<SearchMode>,
}

impl SearchQuery {
    pub fn new(n: usize, kind: SearchKind, limit: usize) -> Self {
        Self {
            n,
            kind,
            limit,
            time_budget: None,
            seed: 0,
            mode: None,
        }
    }

    fn resolved_mode(&self) -> SearchMode {
        self.mode.unwrap_or(if self.n <= MAX_EXHAUSTIVE_N {
            SearchMode::Exhaustive
        } else {
            SearchMode::Heuristic
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub mode: SearchMode,
    pub triples: Vec<GeneratorTriple>,
    /// True when the whole space was covered (exhaustive mode, neither the
    /// limit nor the time budget cut it short).
    pub complete: bool,
    pub timed_out: bool,
}

impl SearchOutcome {
    pub fn none_found(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Degree-`n` polynomials whose Fibonacci index is exactly `2ⁿ + 1`.
pub fn admissible_char_polys(n: usize) -> Result<Vec<Gf2Poly>> {
    let target = (1usize << n) + 1;
    let mut out = Vec::new();
    for low in 0u64..(1u64 << n) {
        let p = Gf2Poly::from_mask(low | (1u64 << n));
        if let Ok(j) = gf2::fibonacci_index(&p, None) {
            if j == target {
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn lex_key(m: &Gf2Matrix) -> Vec<u8> {
    m.row_major_bits()
}

/// Incremental row-independence test; pivots on the lowest set bit.
#[derive(Clone, Default)]
struct XorBasis {
    vecs: Vec<u64>,
}

impl XorBasis {
    fn reduce(&self, mut w: u64) -> u64 {
        for &v in &self.vecs {
            let pivot = v & v.wrapping_neg();
            if w & pivot != 0 {
                w ^= v;
            }
        }
        w
    }

    fn insert(&mut self, w: u64) -> bool {
        let r = self.reduce(w);
        if r == 0 {
            return false;
        }
        let pivot = r & r.wrapping_neg();
        for v in &mut self.vecs {
            if *v & pivot != 0 {
                *v ^= r;
            }
        }
        self.vecs.push(r);
        true
    }
}

/// Null space over Z₂ of the constraint rows (each a bitmask over `nvars`).
fn null_space(rows: &[u64], nvars: usize) -> Vec<u64> {
    let mut rows: Vec<u64> = rows.iter().copied().filter(|&r| r != 0).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row index, pivot column)
    let mut rank = 0;
    for col in 0..nvars {
        let bit = 1u64 << col;
        if let Some(p) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) {
            rows.swap(rank, p);
            for i in 0..rows.len() {
                if i != rank && rows[i] & bit != 0 {
                    rows[i] ^= rows[rank];
                }
            }
            pivots.push((rank, col));
            rank += 1;
        }
    }
    let pivot_cols: u64 = pivots.iter().fold(0, |acc, &(_, c)| acc | (1 << c));
    (0..nvars)
        .filter(|&f| pivot_cols & (1 << f) == 0)
        .map(|free| {
            let mut v = 1u64 << free;
            for &(r, c) in &pivots {
                if rows[r] & (1 << free) != 0 {
                    v |= 1 << c;
                }
            }
            v
        })
        .collect()
}

fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row i of the upper triangle starts at Σ_{k<i} (n − k)
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

fn sym_from_mask(n: usize, mask: u64) -> Gf2Matrix {
    let mut m = Gf2Matrix::zeros(n, n).expect("n <= 64");
    for i in 0..n {
        for j in i..n {
            if (mask >> sym_index(n, i, j)) & 1 == 1 {
                m.set(i, j, true);
                m.set(j, i, true);
            }
        }
    }
    m
}

/// All symmetric `R` with `BR` symmetric, in lexicographic order.
pub fn symmetric_commuting_r(b: &Gf2Matrix) -> Result<Vec<Gf2Matrix>> {
    let n = b.rows();
    if !b.is_square() {
        return Err(Error::NotSquare {
            rows: n,
            cols: b.cols(),
        });
    }
    if n > MAX_SEARCH_N {
        return Err(Error::TooManyQubits {
            what: "R subspace",
            n,
            max: MAX_SEARCH_N,
        });
    }
    let nvars = n * (n + 1) / 2;
    // (BR)_ij = Σ_k B_ik R_kj; require (BR)_ij + (BR)_ji = 0 for i < j
    let mut constraints = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut row = 0u64;
            for k in 0..n {
                if b.get(i, k) {
                    row ^= 1 << sym_index(n, k, j);
                }
                if b.get(j, k) {
                    row ^= 1 << sym_index(n, k, i);
                }
            }
            constraints.push(row);
        }
    }
    let basis = null_space(&constraints, nvars);
    if basis.len() > 20 {
        return Err(Error::TooManyQubits {
            what: "R subspace enumeration (dimension)",
            n: basis.len(),
            max: 20,
        });
    }
    let mut out: Vec<Gf2Matrix> = (1u64..(1u64 << basis.len()))
        .map(|c| {
            let mask = basis
                .iter()
                .enumerate()
                .filter(|(k, _)| (c >> k) & 1 == 1)
                .fold(0u64, |acc, (_, v)| acc ^ v);
            sym_from_mask(n, mask)
        })
        .collect();
    out.sort_by_key(lex_key);
    Ok(out)
}

/// Nonzero symmetric matrices in lexicographic order of their row-major bits.
fn symmetric_lex(n: usize) -> impl Iterator<Item = Gf2Matrix> {
    let m = n * (n + 1) / 2;
    // upper-triangle positions in row-major order are also lex order of the
    // full matrix, so count with the first position as the most significant bit
    (1u64..(1u64 << m)).map(move |k| {
        let mut mask = 0u64;
        for p in 0..m {
            if (k >> (m - 1 - p)) & 1 == 1 {
                mask |= 1 << p;
            }
        }
        sym_from_mask(n, mask)
    })
}

struct Ctx<'a> {
    n: usize,
    kind: SearchKind,
    limit: usize,
    admissible: &'a HashSet<Gf2Poly>,
    deadline: Option<Instant>,
    stop: &'a AtomicBool,
}

impl Ctx<'_> {
    fn expired(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                self.stop.store(true, Ordering::Relaxed);
                return true;
            }
        }
        false
    }
}

/// Triples of the requested kind sharing a given `B`, in `(R, A)` lex order.
fn triples_for_b(b: &Gf2Matrix, kind: SearchKind, limit: usize) -> Result<Vec<GeneratorTriple>> {
    let n = b.rows();
    let zero = Gf2Matrix::zeros(n, n)?;
    let mut out = Vec::new();
    if kind == SearchKind::Field {
        if b.is_symmetric() {
            out.push(GeneratorTriple::field(b.clone())?);
        }
        return Ok(out);
    }
    for r in symmetric_commuting_r(b)? {
        if out.len() >= limit {
            break;
        }
        if r.rank() != n {
            continue;
        }
        match kind {
            SearchKind::Group => {
                if !gf2::in_polynomial_span(&r, b)? {
                    out.push(GeneratorTriple::new(b.clone(), r, zero.clone())?);
                }
            }
            SearchKind::Semigroup => {
                for a in symmetric_lex(n) {
                    if out.len() >= limit {
                        break;
                    }
                    if gf2::semigroup_a_condition(&a, b, &r)? {
                        out.push(GeneratorTriple::new(b.clone(), r.clone(), a)?);
                    }
                }
            }
            SearchKind::Field => unreachable!(),
        }
    }
    Ok(out)
}

/// Row word whose bit `j` is bit `n-1-j` of `v`, so counting `v` upwards
/// walks the row in lexicographic order.
fn lex_row(n: usize, v: u64) -> u64 {
    (0..n).fold(0u64, |acc, j| acc | (((v >> (n - 1 - j)) & 1) << j))
}

fn dfs(
    ctx: &Ctx<'_>,
    rows: &mut Vec<u64>,
    basis: &XorBasis,
    out: &mut Vec<GeneratorTriple>,
) -> Result<()> {
    let n = ctx.n;
    let i = rows.len();
    if i == n {
        let b = Gf2Matrix::from_row_words(n, n, rows.clone())?;
        if ctx.admissible.contains(&gf2::char_poly(&b)?) {
            let room = ctx.limit - out.len();
            out.extend(triples_for_b(&b, ctx.kind, room)?);
        }
        return Ok(());
    }
    let symmetric = ctx.kind == SearchKind::Field;
    // symmetric rows copy their first i bits from the column above
    let (fixed, free_from) = if symmetric {
        let fixed = (0..i).fold(0u64, |acc, k| acc | (((rows[k] >> i) & 1) << k));
        (fixed, i)
    } else {
        (0, 0)
    };
    let width = n - free_from;
    for v in 0u64..(1u64 << width) {
        if out.len() >= ctx.limit || ctx.expired() {
            return Ok(());
        }
        let row = fixed | (lex_row(width, v) << free_from);
        let mut next = basis.clone();
        if !next.insert(row) {
            continue;
        }
        rows.push(row);
        let r = dfs(ctx, rows, &next, out);
        rows.pop();
        r?;
    }
    Ok(())
}

fn exhaustive(q: &SearchQuery) -> Result<SearchOutcome> {
    let n = q.n;
    let admissible: HashSet<Gf2Poly> = admissible_char_polys(n)?.into_iter().collect();
    let stop = AtomicBool::new(false);
    let ctx = Ctx {
        n,
        kind: q.kind,
        limit: q.limit,
        admissible: &admissible,
        deadline: q.time_budget.map(|t| Instant::now() + t),
        stop: &stop,
    };

    // Subtrees under different first rows are independent and already in lex
    // order relative to each other; evaluate them in parallel batches and stop
    // once a batch fills the limit.
    let first_rows: Vec<u64> = (0u64..(1u64 << n)).map(|v| lex_row(n, v)).collect();
    let batch = rayon::current_num_threads().max(1);
    let mut triples = Vec::new();
    for chunk in first_rows.chunks(batch) {
        let parts = chunk
            .par_iter()
            .map(|&row| {
                let mut basis = XorBasis::default();
                let mut out = Vec::new();
                if basis.insert(row) {
                    let mut rows = vec![row];
                    dfs(&ctx, &mut rows, &basis, &mut out)?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        for p in parts {
            triples.extend(p);
        }
        if triples.len() >= q.limit || stop.load(Ordering::Relaxed) {
            break;
        }
    }
    let timed_out = stop.load(Ordering::Relaxed);
    let complete = !timed_out && triples.len() < q.limit;
    triples.truncate(q.limit);
    Ok(SearchOutcome {
        mode: SearchMode::Exhaustive,
        triples,
        complete,
        timed_out,
    })
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, symmetric: bool) -> Gf2Matrix {
    let mut m = Gf2Matrix::zeros(n, n).expect("n <= 64");
    for i in 0..n {
        for j in 0..n {
            if symmetric && j < i {
                m.set(i, j, m.get(j, i));
            } else {
                m.set(i, j, rng.gen::<bool>());
            }
        }
    }
    m
}

fn heuristic(q: &SearchQuery) -> Result<SearchOutcome> {
    let n = q.n;
    let target = (1usize << n) + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
    let deadline = q.time_budget.map(|t| Instant::now() + t);
    let mut found: Vec<GeneratorTriple> = Vec::new();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut timed_out = false;
    for _ in 0..HEURISTIC_ATTEMPTS {
        if found.len() >= q.limit {
            break;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            timed_out = true;
            break;
        }
        // a symmetric B admits only R in its polynomial span, so group sets
        // need the general sampler
        let b = random_matrix(&mut rng, n, q.kind == SearchKind::Field);
        if b.rank() != n || !seen.insert(lex_key(&b)) {
            continue;
        }
        if gf2::fibonacci_index(&gf2::char_poly(&b)?, None).ok() != Some(target) {
            continue;
        }
        let room = q.limit - found.len();
        let cands = match q.kind {
            SearchKind::Semigroup => {
                // sample A rather than walking all 2^{n(n+1)/2}
                let mut out = Vec::new();
                if let Some(r) = symmetric_commuting_r(&b)?
                    .into_iter()
                    .find(|r| r.rank() == n)
                {
                    for _ in 0..64 {
                        let a = random_matrix(&mut rng, n, true);
                        if !a.is_zero() && gf2::semigroup_a_condition(&a, &b, &r)? {
                            out.push(GeneratorTriple::new(b.clone(), r, a)?);
                            break;
                        }
                    }
                }
                out
            }
            kind => triples_for_b(&b, kind, room.min(1))?,
        };
        found.extend(cands);
    }
    found.sort_by_key(triple_key);
    found.truncate(q.limit);
    Ok(SearchOutcome {
        mode: SearchMode::Heuristic,
        triples: found,
        complete: false,
        timed_out,
    })
}

fn triple_key(t: &GeneratorTriple) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    (lex_key(&t.b), lex_key(&t.r), lex_key(&t.a))
}

/// Valid triples of `q.kind`, ordered lexicographically by `(B, R, A)`.
/// An empty outcome means "none found", not an error.
pub fn find_triples(q: &SearchQuery) -> Result<SearchOutcome> {
    if q.n < 2 || q.n > MAX_SEARCH_N {
        return Err(Error::Parse(format!(
            "search needs 2 <= n <= {MAX_SEARCH_N}, got {}",
            q.n
        )));
    }
    if q.limit == 0 {
        return Err(Error::Parse("search limit must be positive".into()));
    }
    let mut outcome = match q.resolved_mode() {
        SearchMode::Exhaustive => exhaustive(q)?,
        SearchMode::Heuristic => heuristic(q)?,
    };
    // belt and braces: every result must classify as requested
    let wanted = q.kind.set_type();
    outcome
        .triples
        .retain(|t| matches!(classify_set_type(t), Ok(k) if k == wanted));
    Ok(outcome)
}

/// Symmetric seed X-parts (including `0`) for which the classes built from
/// `g.c()` form a complete MUB partition, in lexicographic order.
pub fn find_offset_seeds(g: &CyclicGenerator, limit: usize) -> Result<Vec<Gf2Matrix>> {
    let n = g.n();
    if n > 5 {
        return Err(Error::TooManyQubits {
            what: "offset seed enumeration",
            n,
            max: 5,
        });
    }
    let candidates = std::iter::once(Gf2Matrix::zeros(n, n)?).chain(symmetric_lex(n));
    let mut out = Vec::new();
    for sx in candidates {
        if out.len() >= limit {
            break;
        }
        let seeded = g.clone().with_seed_x(sx.clone())?;
        let set = match build_classes(&seeded) {
            Ok(s) => s,
            Err(Error::RankDeficientClass { .. }) => continue,
            Err(e) => return Err(e),
        };
        if validate_mub_partition(&set).is_valid() {
            out.push(sx);
        }
    }
    Ok(out)
}

/// A permutation `perm` with `P a Pᵀ = b`, if one exists (`n ≤ 8`).
pub fn permutation_equivalent(a: &Gf2Matrix, b: &Gf2Matrix) -> Result<Option<Vec<usize>>> {
    let n = a.rows();
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op: "permutation_equivalent",
            left: a.shape(),
            right: b.shape(),
        });
    }
    if n > 8 {
        return Err(Error::TooManyQubits {
            what: "permutation search",
            n,
            max: 8,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    // Heap's algorithm
    let mut c = vec![0usize; n];
    if &a.permute_symmetric(&perm)? == b {
        return Ok(Some(perm));
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if &a.permute_symmetric(&perm)? == b {
                return Ok(Some(perm));
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(None)
}
