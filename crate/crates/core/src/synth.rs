//! Compilation of symplectic generators into {H, S, CZ, CNOT} circuits.
//!
//! Gate actions on `a = (a^z; a^x)`:
//!
//! | gate          | action                                  |
//! |---------------|-----------------------------------------|
//! | `H_i`         | swap `a^z_i`, `a^x_i`                   |
//! | `S_i`         | `a^z_i += a^x_i`                        |
//! | `CZ_ij`       | `a^z_i += a^x_j`, `a^z_j += a^x_i`      |
//! | `CNOT_{c→t}`  | `a^x_t += a^x_c`, `a^z_c += a^z_t`      |
//!
//! Every one of these matrices is an involution over Z₂, which the
//! synthesizer relies on when it reverses its elimination sequence.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::mub::symplectic_violation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    /// Symmetric in its two qubits.
    CZ(usize, usize),
    CNOT {
        control: usize,
        target: usize,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) => vec![q],
            Gate::CZ(a, b) => vec![a, b],
            Gate::CNOT { control, target } => vec![control, target],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::CZ(..) => "CZ",
            Gate::CNOT { .. } => "CNOT",
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(Error::InvalidGate(format!(
                "{self:?}: qubit {q} out of range for n = {n}"
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidGate(format!(
                "{self:?}: pair gate on a single qubit"
            )));
        }
        Ok(())
    }

    /// Applies the gate's action to the rows of `m`, i.e. `m ← M_gate · m`.
    /// `m` has `2n` rows laid out as `(z; x)`.
    fn apply_left(&self, m: &mut Gf2Matrix, n: usize) {
        match *self {
            Gate::H(q) => m.swap_rows(q, n + q),
            Gate::S(q) => m.add_row(n + q, q),
            Gate::CZ(i, j) => {
                m.add_row(n + j, i);
                m.add_row(n + i, j);
            }
            Gate::CNOT { control, target } => {
                m.add_row(n + control, n + target);
                m.add_row(target, control);
            }
        }
    }
}

/// `2n × 2n` symplectic matrix of a single gate.
pub fn gate_symplectic(g: &Gate, n: usize) -> Result<Gf2Matrix> {
    g.validate(n)?;
    let mut m = Gf2Matrix::identity(2 * n)?;
    g.apply_left(&mut m, n);
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub n: usize,
    /// Applied left to right in time.
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Self { n, gates })
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::LengthMismatch(self.n, other.n));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Replaces each CNOT by `H_t · CZ · H_t`, leaving only H, S and CZ.
    pub fn rewrite_cnots(&self) -> Self {
        let mut gates = Vec::with_capacity(self.gates.len());
        for &g in &self.gates {
            match g {
                Gate::CNOT { control, target } => {
                    gates.push(Gate::H(target));
                    gates.push(Gate::CZ(control, target));
                    gates.push(Gate::H(target));
                }
                other => gates.push(other),
            }
        }
        Self { n: self.n, gates }
    }

    pub fn count(&self, kind: &str) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }
}

/// Ordered product of gate matrices: the returned `M` satisfies
/// `U ZX(a) U† = ±ZX(M a)` for the circuit unitary `U`.
pub fn circuit_symplectic(c: &Circuit) -> Result<Gf2Matrix> {
    let mut m = Gf2Matrix::identity(2 * c.n)?;
    for g in &c.gates {
        g.validate(c.n)?;
        g.apply_left(&mut m, c.n);
    }
    Ok(m)
}

/// Fast path for `C = [[B, I], [I, 0]]`: Hadamards on every qubit, then `S_i`
/// for each `B_ii = 1` and `CZ_ij` for each `i < j` with `B_ij = 1`.
pub fn synth_field_based(b: &Gf2Matrix) -> Result<Circuit> {
    if !b.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = b.rows();
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.gates.push(Gate::H(q));
    }
    for q in 0..n {
        if b.get(q, q) {
            c.gates.push(Gate::S(q));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if b.get(i, j) {
                c.gates.push(Gate::CZ(i, j));
            }
        }
    }
    Ok(c)
}

/// Upper bound on [`synthesize`] output length: `2n² + 3n`.
pub fn synthesis_gate_bound(n: usize) -> usize {
    2 * n * n + 3 * n
}

#[inline]
fn bit(w: u64, k: usize) -> bool {
    (w >> k) & 1 == 1
}

/// Symplectic Gaussian elimination.
///
/// Works qubit by qubit: the image of `X_i` is reduced to `X_i` (H/S clear its
/// z-part, CNOTs collapse its x-part onto qubit `i`), then after an `H_i` the
/// image of `Z_i` is reduced the same way using gates that fix `Z_i`. Every
/// applied gate is recorded; since all gate matrices are involutions, `C` is
/// the product of the recorded gates in reverse.
pub fn synthesize(c: &Gf2Matrix) -> Result<Circuit> {
    if let Some((row, col)) = symplectic_violation(c)? {
        return Err(Error::NotSymplectic { row, col });
    }
    let n = c.rows() / 2;
    let mut w = c.clone();
    let mut applied: Vec<Gate> = Vec::new();
    let mut apply = |g: Gate, w: &mut Gf2Matrix| {
        g.apply_left(w, n);
        applied.push(g);
    };

    for i in 0..n {
        // image of X_i -> X_i
        let xcol = n + i;
        for k in i..n {
            let p = w.col_word(xcol);
            if bit(p, k) {
                if bit(p, n + k) {
                    apply(Gate::S(k), &mut w);
                } else {
                    apply(Gate::H(k), &mut w);
                }
            }
        }
        let p = w.col_word(xcol);
        if !bit(p, n + i) {
            let k = (i + 1..n)
                .find(|&k| bit(p, n + k))
                .expect("symplectic column has x-support on qubits >= i");
            apply(
                Gate::CNOT {
                    control: k,
                    target: i,
                },
                &mut w,
            );
        }
        let p = w.col_word(xcol);
        for k in i + 1..n {
            if bit(p, n + k) {
                apply(
                    Gate::CNOT {
                        control: i,
                        target: k,
                    },
                    &mut w,
                );
            }
        }
        debug_assert_eq!(w.col_word(xcol), 1 << (n + i));
        if w.col_word(i) == 1 << i {
            continue;
        }

        // image of Z_i -> Z_i, using only gates that fix Z_i after this H
        apply(Gate::H(i), &mut w);
        let zcol = i;
        for k in i + 1..n {
            let q = w.col_word(zcol);
            if bit(q, k) {
                if bit(q, n + k) {
                    apply(Gate::S(k), &mut w);
                } else {
                    apply(Gate::H(k), &mut w);
                }
            }
        }
        let q = w.col_word(zcol);
        debug_assert!(bit(q, n + i));
        for k in i + 1..n {
            if bit(q, n + k) {
                apply(
                    Gate::CNOT {
                        control: i,
                        target: k,
                    },
                    &mut w,
                );
            }
        }
        if bit(w.col_word(zcol), i) {
            apply(Gate::S(i), &mut w);
        }
        apply(Gate::H(i), &mut w);
        debug_assert_eq!(w.col_word(zcol), 1 << i);
        debug_assert_eq!(w.col_word(xcol), 1 << (n + i));
    }
    debug_assert!(w.is_identity());

    applied.reverse();
    Ok(Circuit { n, gates: applied })
}

/// Symplectic map taking the standard seed `(I; 0)` to `(I; G₀ˣ)`: `[[I, 0], [G₀ˣ, I]]`.
pub fn seed_offset_matrix(seed_x: &Gf2Matrix) -> Result<Gf2Matrix> {
    let n = seed_x.rows();
    let i = Gf2Matrix::identity(n)?;
    Gf2Matrix::from_blocks(&i, &Gf2Matrix::zeros(n, n)?, seed_x, &i)
}

/// Circuit for the seed offset; empty for the standard seed.
pub fn synth_seed_offset(seed_x: &Gf2Matrix) -> Result<Circuit> {
    if !seed_x.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    synthesize(&seed_offset_matrix(seed_x)?)
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    kind: String,
    qubits: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    n: usize,
    gates: Vec<GateJson>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Qasm,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qasm" => Ok(Self::Qasm),
            "json" => Ok(Self::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

pub fn to_qasm(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", c.n);
    for g in &c.gates {
        let _ = match *g {
            Gate::H(q) => writeln!(out, "h q[{q}];"),
            Gate::S(q) => writeln!(out, "s q[{q}];"),
            Gate::CZ(a, b) => writeln!(out, "cz q[{a}],q[{b}];"),
            Gate::CNOT { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
        };
    }
    out
}

pub fn to_json(c: &Circuit) -> Result<String> {
    let doc = CircuitJson {
        n: c.n,
        gates: c
            .gates
            .iter()
            .map(|g| GateJson {
                kind: g.kind().to_string(),
                qubits: g.qubits(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn from_json(text: &str) -> Result<Circuit> {
    let doc: CircuitJson = serde_json::from_str(text)?;
    let gates = doc
        .gates
        .iter()
        .map(|g| match (g.kind.as_str(), g.qubits.as_slice()) {
            ("H", &[q]) => Ok(Gate::H(q)),
            ("S", &[q]) => Ok(Gate::S(q)),
            ("CZ", &[a, b]) => Ok(Gate::CZ(a, b)),
            ("CNOT", &[control, target]) => Ok(Gate::CNOT { control, target }),
            (k, q) => Err(Error::InvalidGate(format!("{k} on {q:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Circuit::from_gates(doc.n, gates)
}

pub fn export_circuit(c: &Circuit, format: &str) -> Result<String> {
    match format.parse::<ExportFormat>()? {
        ExportFormat::Qasm => Ok(to_qasm(c)),
        ExportFormat::Json => to_json(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn mat(rows: &[&[u8]]) -> Gf2Matrix {
        Gf2Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn single_gate_matrices() {
        assert_eq!(
            gate_symplectic(&Gate::H(0), 1).unwrap(),
            mat(&[&[0, 1], &[1, 0]])
        );
        assert_eq!(
            gate_symplectic(&Gate::S(0), 1).unwrap(),
            mat(&[&[1, 1], &[0, 1]])
        );
        let cz = gate_symplectic(&Gate::CZ(0, 1), 2).unwrap();
        assert_eq!(
            cz,
            mat(&[&[1, 0, 0, 1], &[0, 1, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]])
        );
        let cx = gate_symplectic(
            &Gate::CNOT {
                control: 0,
                target: 1,
            },
            2,
        )
        .unwrap();
        assert_eq!(
            cx,
            mat(&[&[1, 1, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 1, 1]])
        );
        for g in [
            Gate::H(0),
            Gate::S(1),
            Gate::CZ(0, 1),
            Gate::CNOT {
                control: 1,
                target: 0,
            },
        ] {
            let m = gate_symplectic(&g, 2).unwrap();
            assert!((&m * &m).is_identity(), "{g:?} is not an involution");
        }
    }

    #[test]
    fn invalid_gates() {
        assert!(gate_symplectic(&Gate::H(3), 3).is_err());
        assert!(gate_symplectic(&Gate::CZ(1, 1), 3).is_err());
        assert!(Circuit::from_gates(
            2,
            vec![Gate::CNOT {
                control: 0,
                target: 2
            }]
        )
        .is_err());
    }

    #[test]
    fn circuit_products() {
        assert!(circuit_symplectic(&Circuit::new(3)).unwrap().is_identity());
        let hh = Circuit::from_gates(1, vec![Gate::H(0), Gate::H(0)]).unwrap();
        assert!(circuit_symplectic(&hh).unwrap().is_identity());
        // H then S: S·H
        let hs = Circuit::from_gates(1, vec![Gate::H(0), Gate::S(0)]).unwrap();
        assert_eq!(circuit_symplectic(&hs).unwrap(), mat(&[&[1, 1], &[1, 0]]));
    }

    #[test]
    fn field_fast_path() {
        let z = Gf2Matrix::zeros(3, 3).unwrap();
        let c = synth_field_based(&z).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.count("H"), 3);

        let b = fixtures::field3().triple().unwrap().b.clone();
        let c = synth_field_based(&b).unwrap();
        assert_eq!((c.count("H"), c.count("S"), c.count("CZ")), (3, 2, 2));
        assert_eq!(c.gates[3..5], [Gate::S(0), Gate::S(1)]);
        assert_eq!(c.gates[5..], [Gate::CZ(0, 1), Gate::CZ(0, 2)]);
        let i3 = Gf2Matrix::identity(3).unwrap();
        let expected = Gf2Matrix::from_blocks(&b, &i3, &i3, &z).unwrap();
        assert_eq!(circuit_symplectic(&c).unwrap(), expected);

        let b2 = mat(&[&[1, 1], &[1, 0]]);
        let c2 = synth_field_based(&b2).unwrap();
        assert_eq!((c2.count("H"), c2.count("S"), c2.count("CZ")), (2, 1, 1));

        let nonsym = mat(&[&[0, 1], &[0, 0]]);
        assert!(matches!(
            synth_field_based(&nonsym),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn synthesize_identity_is_empty() {
        let c = synthesize(&Gf2Matrix::identity(6).unwrap()).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn synthesize_round_trips_fixtures() {
        for name in fixtures::THREE_QUBIT_SETS {
            let g = fixtures::by_name(name).unwrap().generator().unwrap();
            let circ = synthesize(g.c()).unwrap();
            assert_eq!(&circuit_symplectic(&circ).unwrap(), g.c(), "{name}");
            assert!(circ.len() <= synthesis_gate_bound(3));
        }
    }

    #[test]
    fn synthesize_rejects_non_symplectic() {
        let fx = fixtures::semigroup3_printed();
        let c = fx.reference_c.unwrap();
        match synthesize(&c) {
            Err(Error::NotSymplectic { row, col }) => {
                let msg = Error::NotSymplectic { row, col }.to_string();
                assert!(msg.contains("C^T J C"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cnot_rewrite_preserves_action() {
        let g = fixtures::group3().generator().unwrap();
        let circ = synthesize(g.c()).unwrap();
        let hcz = circ.rewrite_cnots();
        assert_eq!(hcz.count("CNOT"), 0);
        assert_eq!(
            circuit_symplectic(&hcz).unwrap(),
            circuit_symplectic(&circ).unwrap()
        );
    }

    #[test]
    fn seed_offset_circuit() {
        let sx = fixtures::offset3().seed_x.unwrap();
        let circ = synth_seed_offset(&sx).unwrap();
        let m = circuit_symplectic(&circ).unwrap();
        let seed = Gf2Matrix::identity(3)
            .unwrap()
            .vstack(&Gf2Matrix::zeros(3, 3).unwrap())
            .unwrap();
        let expected = Gf2Matrix::identity(3).unwrap().vstack(&sx).unwrap();
        assert_eq!(&m * &seed, expected);
    }

    #[test]
    fn export_formats() {
        let c = Circuit::from_gates(1, vec![Gate::H(0)]).unwrap();
        let q = export_circuit(&c, "qasm").unwrap();
        assert_eq!(q.lines().filter(|l| *l == "h q[0];").count(), 1);
        assert!(q.contains("qreg q[1];"));
        assert!(matches!(
            export_circuit(&c, "svg"),
            Err(Error::UnknownFormat(_))
        ));

        let b = fixtures::field3().triple().unwrap().b.clone();
        let field = synth_field_based(&b).unwrap();
        let text = to_qasm(&field);
        let gate_lines: Vec<&str> = text.lines().skip(3).collect();
        assert_eq!(
            gate_lines,
            [
                "h q[0];",
                "h q[1];",
                "h q[2];",
                "s q[0];",
                "s q[1];",
                "cz q[0],q[1];",
                "cz q[0],q[2];"
            ]
        );

        let mixed = Circuit::from_gates(
            3,
            vec![
                Gate::H(2),
                Gate::CNOT {
                    control: 2,
                    target: 0,
                },
                Gate::CZ(1, 2),
                Gate::S(1),
            ],
        )
        .unwrap();
        let json = export_circuit(&mixed, "json").unwrap();
        assert_eq!(from_json(&json).unwrap(), mixed);
        assert!(to_qasm(&mixed).contains("cx q[2],q[0];"));
    }
}
