//! Dense state-vector checks for small `n`: circuit unitaries, numeric
//! unbiasedness and cyclicity, class eigenbases and a Schmidt-rank oracle for
//! the entanglement structure.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dense::{norm, CMatrix, C64};
use crate::entanglement::QubitPartition;
use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::mub::{CyclicGenerator, MubClass};
use crate::pauli::{zx, SymplecticVector, MAX_DENSE_QUBITS};
use crate::synth::{synth_seed_offset, synthesize, Circuit, Gate};

/// Singular values below this count as zero in Schmidt ranks.
pub const SCHMIDT_THRESHOLD: f64 = 1e-8;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Class eigenbases need `d` projectors of size `d × d`; keep it small.
pub const MAX_EIGENBASIS_QUBITS: usize = 6;

fn check_dense(what: &'static str, n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::TooManyQubits { what, n, max });
    }
    Ok(())
}

/// Applies `g` in place. Qubit 0 is the most significant bit of the index.
pub fn apply_gate(state: &mut [C64], n: usize, g: &Gate) {
    let mask = |q: usize| 1usize << (n - 1 - q);
    match *g {
        Gate::H(q) => {
            let m = mask(q);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..state.len() {
                if i & m == 0 {
                    let (a, b) = (state[i], state[i | m]);
                    state[i] = (a + b) * s;
                    state[i | m] = (a - b) * s;
                }
            }
        }
        Gate::S(q) => {
            let m = mask(q);
            for (i, v) in state.iter_mut().enumerate() {
                if i & m != 0 {
                    *v *= C64::i();
                }
            }
        }
        Gate::CZ(a, b) => {
            let m = mask(a) | mask(b);
            for (i, v) in state.iter_mut().enumerate() {
                if i & m == m {
                    *v = -*v;
                }
            }
        }
        Gate::CNOT { control, target } => {
            let (mc, mt) = (mask(control), mask(target));
            for i in 0..state.len() {
                if i & mc != 0 && i & mt == 0 {
                    state.swap(i, i | mt);
                }
            }
        }
    }
}

fn apply_circuit(state: &mut [C64], c: &Circuit) {
    for g in &c.gates {
        apply_gate(state, c.n, g);
    }
}

/// Applies `U†` for the circuit `U`; every gate but `S` is self-inverse.
fn apply_circuit_inverse(state: &mut [C64], c: &Circuit) {
    let m = |q: usize| 1usize << (c.n - 1 - q);
    for g in c.gates.iter().rev() {
        match *g {
            Gate::S(q) => {
                for (i, v) in state.iter_mut().enumerate() {
                    if i & m(q) != 0 {
                        *v *= -C64::i();
                    }
                }
            }
            other => apply_gate(state, c.n, &other),
        }
    }
}

fn basis_vector(dim: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[k] = C64::new(1.0, 0.0);
    v
}

pub fn circuit_unitary(c: &Circuit) -> Result<CMatrix> {
    check_dense("circuit unitary", c.n, MAX_DENSE_QUBITS)?;
    let dim = 1usize << c.n;
    let mut u = CMatrix::zeros(dim);
    let mut col = vec![C64::new(0.0, 0.0); dim];
    for j in 0..dim {
        col.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        col[j] = C64::new(1.0, 0.0);
        for g in &c.gates {
            apply_gate(&mut col, c.n, g);
        }
        for (i, v) in col.iter().enumerate() {
            u.set(i, j, *v);
        }
    }
    Ok(u)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericReport {
    pub check: String,
    pub passed: bool,
    pub worst_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Unitaries realising a cyclic set: `U` acts as `C`, `W` takes the
/// computational basis to the seed class's eigenbasis.
#[derive(Clone, Debug)]
pub struct SetUnitaries {
    pub generator_circuit: Circuit,
    pub seed_circuit: Circuit,
    pub u: CMatrix,
    pub w: CMatrix,
}

impl SetUnitaries {
    pub fn new(g: &CyclicGenerator) -> Result<Self> {
        check_dense("set unitaries", g.n(), MAX_DENSE_QUBITS)?;
        let generator_circuit = synthesize(g.c())?;
        let seed_circuit = synth_seed_offset(g.seed_x())?;
        Ok(Self {
            u: circuit_unitary(&generator_circuit)?,
            w: circuit_unitary(&seed_circuit)?,
            generator_circuit,
            seed_circuit,
        })
    }
}

/// Every entry of `W† Uᵐ W` must have squared modulus `1/d`, for `m = 1..d`.
/// The basis for class `j` is `Uʲ W |k⟩`, so this covers every pair of bases.
pub fn verify_unbiased(u: &CMatrix, w: &CMatrix, tol: f64) -> NumericReport {
    let d = u.dim();
    let target = 1.0 / d as f64;
    let wd = w.adjoint();
    let mut worst = 0.0f64;
    let mut witness = None;
    let mut um = CMatrix::identity(d);
    for m in 1..=d {
        um = u.matmul(&um);
        let overlap = wd.matmul(&um.matmul(w));
        for i in 0..d {
            for k in 0..d {
                let dev = (overlap.get(i, k).norm_sqr() - target).abs();
                if dev > worst {
                    worst = dev;
                    if dev >= tol {
                        witness = Some(format!(
                            "m = {m}, entry ({i}, {k}): |.|^2 = {}",
                            overlap.get(i, k).norm_sqr()
                        ));
                    }
                }
            }
        }
    }
    NumericReport {
        check: "unbiased".into(),
        passed: worst < tol,
        worst_deviation: worst,
        witness,
    }
}

/// `U^{d+1} ∝ I`: off-diagonal entries vanish and the diagonal is a single phase.
pub fn verify_cyclic(u: &CMatrix, tol: f64) -> NumericReport {
    let d = u.dim();
    let p = u.pow(d as u64 + 1);
    let phase = p.get(0, 0);
    let mut worst = (phase.norm() - 1.0).abs();
    let mut witness = None;
    for i in 0..d {
        for k in 0..d {
            let expected = if i == k { phase } else { C64::new(0.0, 0.0) };
            let dev = (p.get(i, k) - expected).norm();
            if dev > worst {
                worst = dev;
                if dev >= tol {
                    witness = Some(format!("U^{} entry ({i}, {k}) = {}", d + 1, p.get(i, k)));
                }
            }
        }
    }
    NumericReport {
        check: "cyclic".into(),
        passed: worst < tol,
        worst_deviation: worst,
        witness,
    }
}

/// Same checks as [`verify_unbiased`] and [`verify_cyclic`], but applying the
/// circuits gate by gate to state vectors instead of forming dense products.
/// Cost is `O(gates · d³)`, which keeps `n = 8` within reach.
pub fn verify_set_numeric(g: &CyclicGenerator, tol: f64) -> Result<Vec<NumericReport>> {
    check_dense("numeric set check", g.n(), MAX_DENSE_QUBITS)?;
    let gen = synthesize(g.c())?;
    let seed = synth_seed_offset(g.seed_x())?;
    let d = 1usize << g.n();
    let target = 1.0 / d as f64;

    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|k| {
            let mut v = basis_vector(d, k);
            apply_circuit(&mut v, &seed);
            v
        })
        .collect();
    let (mut worst, mut witness) = (0.0f64, None);
    for m in 1..=d {
        for (k, col) in cols.iter_mut().enumerate() {
            apply_circuit(col, &gen);
            let mut overlap = col.clone();
            apply_circuit_inverse(&mut overlap, &seed);
            for (i, v) in overlap.iter().enumerate() {
                let dev = (v.norm_sqr() - target).abs();
                if dev > worst {
                    worst = dev;
                    if dev >= tol {
                        witness = Some(format!(
                            "m = {m}, entry ({i}, {k}): |.|^2 = {}",
                            v.norm_sqr()
                        ));
                    }
                }
            }
        }
    }
    let unbiased = NumericReport {
        check: "unbiased".into(),
        passed: worst < tol,
        worst_deviation: worst,
        witness,
    };

    let (mut worst, mut witness) = (0.0f64, None);
    let mut phase = None;
    for k in 0..d {
        let mut v = basis_vector(d, k);
        for _ in 0..=d {
            apply_circuit(&mut v, &gen);
        }
        let ph = *phase.get_or_insert(v[k]);
        let dev0 = (ph.norm() - 1.0).abs();
        if dev0 > worst {
            worst = dev0;
        }
        for (i, x) in v.iter().enumerate() {
            let expected = if i == k { ph } else { C64::new(0.0, 0.0) };
            let dev = (x - expected).norm();
            if dev > worst {
                worst = dev;
                if dev >= tol {
                    witness = Some(format!("U^{} entry ({i}, {k}) = {x}", d + 1));
                }
            }
        }
    }
    let cyclic = NumericReport {
        check: "cyclic".into(),
        passed: worst < tol,
        worst_deviation: worst,
        witness,
    };
    Ok(vec![unbiased, cyclic])
}

/// Checks `U ZX(a) U† = ±ZX(Ma)` for every nonzero `a`; returns the first
/// vector where it fails.
pub fn conjugation_mismatch(
    c: &Circuit,
    m: &Gf2Matrix,
    tol: f64,
) -> Result<Option<SymplecticVector>> {
    let n = c.n;
    if m.rows() != 2 * n || !m.is_square() {
        return Err(Error::DimensionMismatch {
            op: "conjugation check",
            left: (2 * n, 2 * n),
            right: m.shape(),
        });
    }
    let u = circuit_unitary(c)?;
    let ud = u.adjoint();
    for word in 1u64..(1u64 << (2 * n)) {
        let a = SymplecticVector::from_word(n, word)?;
        let lhs = u.matmul(&zx(&a).dense_matrix()?).matmul(&ud);
        let b = SymplecticVector::from_word(n, m.mul_vec(word))?;
        let rhs = zx(&b).dense_matrix()?;
        let plus = lhs.max_abs_diff(&rhs);
        let minus = lhs.max_abs_diff(&rhs.scale(C64::new(-1.0, 0.0)));
        if plus.min(minus) > tol {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Common eigenbasis of a class: for each sign pattern `s`, the image of
/// `∏_k (I + (−1)^{s_k} O_k)/2` over the generator operators `O_k`.
pub fn class_eigenbasis(class: &MubClass) -> Result<Vec<Vec<C64>>> {
    let n = class.n();
    check_dense("class eigenbasis", n, MAX_EIGENBASIS_QUBITS)?;
    let d = 1usize << n;
    let ops = class
        .generator_columns()
        .iter()
        .map(|a| zx(a).dense_matrix())
        .collect::<Result<Vec<_>>>()?;
    let id = CMatrix::identity(d);
    let half = C64::new(0.5, 0.0);
    let mut basis = Vec::with_capacity(d);
    for s in 0..d {
        let mut proj = id.clone();
        for (k, o) in ops.iter().enumerate() {
            let sign = if (s >> k) & 1 == 1 { -1.0 } else { 1.0 };
            let mut factor = o.scale(C64::new(sign, 0.0));
            for i in 0..d {
                factor.set(i, i, factor.get(i, i) + C64::new(1.0, 0.0));
            }
            proj = proj.matmul(&factor.scale(half));
        }
        let (best, nrm) = (0..d)
            .map(|j| (j, norm(&proj.column(j))))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("d > 0");
        if nrm < 1e-6 {
            return Err(Error::Numerical(format!(
                "class {}: projector for sign pattern {s} is zero",
                class.index
            )));
        }
        basis.push(proj.column(best).iter().map(|v| v / nrm).collect());
    }
    Ok(basis)
}

fn schmidt_rank(state: &[C64], n: usize, side: u64) -> usize {
    let left: Vec<usize> = (0..n).filter(|q| (side >> q) & 1 == 1).collect();
    let right: Vec<usize> = (0..n).filter(|q| (side >> q) & 1 == 0).collect();
    let index_of = |qs: &[usize], i: usize| {
        qs.iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1))
    };
    let mut m = DMatrix::<C64>::zeros(1 << left.len(), 1 << right.len());
    for (i, v) in state.iter().enumerate() {
        m[(index_of(&left, i), index_of(&right, i))] = *v;
    }
    m.singular_values()
        .iter()
        .filter(|&&s| s > SCHMIDT_THRESHOLD)
        .count()
}

/// Finest product partition of a pure state: qubits share a block unless some
/// Schmidt-rank-1 bipartition separates them.
pub fn schmidt_partition(state: &[C64], n: usize) -> Result<QubitPartition> {
    check_dense("Schmidt partition", n, MAX_DENSE_QUBITS)?;
    if state.len() != 1 << n {
        return Err(Error::LengthMismatch(state.len(), 1 << n));
    }
    let all = (1u64 << n) - 1;
    // cuts containing qubit 0, excluding the trivial one
    let separable: Vec<u64> = (0..(1u64 << (n - 1)))
        .map(|s| (s << 1) | 1)
        .filter(|&side| side != all && schmidt_rank(state, n, side) == 1)
        .collect();
    let mut blocks: Vec<u64> = Vec::new();
    let mut assigned = 0u64;
    for i in 0..n {
        if (assigned >> i) & 1 == 1 {
            continue;
        }
        let mut block = 0u64;
        for j in i..n {
            let split = separable
                .iter()
                .any(|&cut| ((cut >> i) & 1) != ((cut >> j) & 1));
            if !split {
                block |= 1 << j;
            }
        }
        assigned |= block;
        blocks.push(block);
    }
    QubitPartition::new(n, blocks)
}

/// Schmidt-rank partition of a class's eigenbasis. All eigenvectors differ by
/// local Paulis and must agree; disagreement is reported as a numerical error.
pub fn class_schmidt_partition(class: &MubClass) -> Result<QubitPartition> {
    let n = class.n();
    let basis = class_eigenbasis(class)?;
    let first = schmidt_partition(&basis[0], n)?;
    for (k, v) in basis.iter().enumerate().skip(1) {
        let p = schmidt_partition(v, n)?;
        if p != first {
            return Err(Error::Numerical(format!(
                "class {}: eigenvectors 0 and {k} have partitions {first} and {p}",
                class.index
            )));
        }
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::finest_partition;
    use crate::fixtures;
    use crate::mub::build_classes;
    use crate::synth::circuit_symplectic;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gate_unitaries_match_textbook_matrices() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = circuit_unitary(&Circuit::from_gates(1, vec![Gate::H(0)]).unwrap()).unwrap();
        let expected =
            CMatrix::from_rows(&[vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]);
        assert!(h.max_abs_diff(&expected) < 1e-12);

        // CNOT with control qubit 0 (the high bit): |10> -> |11>
        let cx = circuit_unitary(
            &Circuit::from_gates(
                2,
                vec![Gate::CNOT {
                    control: 0,
                    target: 1,
                }],
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(cx.get(3, 2), c(1.0, 0.0));
        assert_eq!(cx.get(1, 1), c(1.0, 0.0));

        let cz = circuit_unitary(&Circuit::from_gates(2, vec![Gate::CZ(1, 0)]).unwrap()).unwrap();
        assert_eq!(cz.get(3, 3), c(-1.0, 0.0));
        assert_eq!(cz.get(2, 2), c(1.0, 0.0));
    }

    #[test]
    fn every_gate_conjugates_like_its_matrix() {
        let gates = [
            Gate::H(1),
            Gate::S(0),
            Gate::CZ(0, 2),
            Gate::CNOT {
                control: 2,
                target: 1,
            },
            Gate::CNOT {
                control: 0,
                target: 1,
            },
        ];
        for g in gates {
            let circ = Circuit::from_gates(3, vec![g]).unwrap();
            let m = circuit_symplectic(&circ).unwrap();
            assert_eq!(
                conjugation_mismatch(&circ, &m, 1e-9).unwrap(),
                None,
                "{g:?}"
            );
        }
    }

    #[test]
    fn conjugation_detects_wrong_matrix() {
        let circ = Circuit::from_gates(2, vec![Gate::H(0)]).unwrap();
        let wrong = Gf2Matrix::identity(4).unwrap();
        assert!(conjugation_mismatch(&circ, &wrong, 1e-9).unwrap().is_some());
    }

    #[test]
    fn field_set_is_unbiased_and_cyclic() {
        let g = fixtures::field3().generator().unwrap();
        let su = SetUnitaries::new(&g).unwrap();
        assert!(su.seed_circuit.is_empty());
        let r = verify_unbiased(&su.u, &su.w, DEFAULT_TOL);
        assert!(r.passed, "{r:?}");
        let r = verify_cyclic(&su.u, DEFAULT_TOL);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn state_vector_checks_agree_with_dense_ones() {
        for name in fixtures::THREE_QUBIT_SETS {
            let g = fixtures::by_name(name).unwrap().generator().unwrap();
            let su = SetUnitaries::new(&g).unwrap();
            let dense = [
                verify_unbiased(&su.u, &su.w, DEFAULT_TOL),
                verify_cyclic(&su.u, DEFAULT_TOL),
            ];
            let fast = verify_set_numeric(&g, DEFAULT_TOL).unwrap();
            for (a, b) in dense.iter().zip(&fast) {
                assert_eq!(a.check, b.check);
                assert!(a.passed && b.passed, "{name}: {a:?} {b:?}");
                assert!((a.worst_deviation - b.worst_deviation).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn non_cyclic_unitary_is_flagged() {
        let u = circuit_unitary(&Circuit::from_gates(1, vec![Gate::S(0)]).unwrap()).unwrap();
        // S^3 is not proportional to I
        let r = verify_cyclic(&u, DEFAULT_TOL);
        assert!(!r.passed);
        assert!(r.witness.is_some());
        // and the standard basis is not unbiased with itself under S
        assert!(!verify_unbiased(&u, &CMatrix::identity(2), DEFAULT_TOL).passed);
    }

    #[test]
    fn schmidt_partition_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero = c(0.0, 0.0);
        // |0>|Φ+> on qubits (0 | 1 2)
        let mut psi = vec![zero; 8];
        psi[0] = c(s, 0.0);
        psi[3] = c(s, 0.0);
        assert_eq!(schmidt_partition(&psi, 3).unwrap().to_string(), "1|23");
        let mut ghz = vec![zero; 8];
        ghz[0] = c(s, 0.0);
        ghz[7] = c(s, 0.0);
        assert_eq!(schmidt_partition(&ghz, 3).unwrap().to_string(), "123");
        let mut basis = vec![zero; 8];
        basis[5] = c(1.0, 0.0);
        assert_eq!(schmidt_partition(&basis, 3).unwrap().to_string(), "1|2|3");
    }

    #[test]
    fn eigenbasis_is_orthonormal_and_agrees_with_partitions() {
        let set = build_classes(&fixtures::group3().generator().unwrap()).unwrap();
        for class in &set.classes {
            let basis = class_eigenbasis(class).unwrap();
            for (i, a) in basis.iter().enumerate() {
                for (k, b) in basis.iter().enumerate() {
                    let ip = crate::dense::inner(a, b).norm();
                    let expected = if i == k { 1.0 } else { 0.0 };
                    assert!((ip - expected).abs() < 1e-9);
                }
            }
            assert_eq!(
                class_schmidt_partition(class).unwrap(),
                finest_partition(class).unwrap()
            );
        }
    }
}
