//! Entanglement structure of MUB classes.
//!
//! A class factorizes over a qubit partition exactly when every pair of its
//! operators commutes blockwise, i.e. each per-qubit anticommutation vector has
//! even weight on every block. Bilinearity means generator pairs suffice.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mub::{CyclicMubSet, MubClass};
use crate::pauli::qubitwise_commutation_vector;

pub const MAX_PARTITION_QUBITS: usize = 10;

/// Disjoint blocks covering `{0..n}`; each block is a qubit bitmask.
/// Blocks are kept sorted by their lowest qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QubitPartition {
    n: usize,
    blocks: Vec<u64>,
}

impl QubitPartition {
    pub fn new(n: usize, mut blocks: Vec<u64>) -> Result<Self> {
        let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut seen = 0u64;
        for &b in &blocks {
            if b == 0 || b & seen != 0 || b & !full != 0 {
                return Err(Error::Parse(format!("invalid partition blocks {blocks:?}")));
            }
            seen |= b;
        }
        if seen != full {
            return Err(Error::Parse(format!(
                "blocks {blocks:?} do not cover {n} qubits"
            )));
        }
        blocks.sort_by_key(|b| b.trailing_zeros());
        Ok(Self { n, blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n).map(|k| 1u64 << k).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block sizes sorted ascending, e.g. `[1, 2]`.
    pub fn shape(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .blocks
            .iter()
            .map(|b| b.count_ones() as usize)
            .collect();
        s.sort_unstable();
        s
    }

    /// The same partition after relabeling qubit `k` as `perm[k]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|&b| {
                (0..self.n)
                    .filter(|k| (b >> k) & 1 == 1)
                    .map(|k| 1u64 << perm[k])
                    .sum()
            })
            .collect();
        Self::new(self.n, blocks).expect("relabeling preserves validity")
    }
}

/// 1-based labels, blocks separated by `|`: `"1|23"`. Above 9 qubits labels are comma separated.
impl fmt::Display for QubitPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n > 9 { "," } else { "" };
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|&b| {
                (0..self.n)
                    .filter(|k| (b >> k) & 1 == 1)
                    .map(|k| (k + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(sep)
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

/// Calls `visit` with every set partition of `{0..n}` as block masks
/// (restricted growth strings, lexicographic).
pub fn for_each_set_partition(n: usize, mut visit: impl FnMut(&[u64])) {
    if n == 0 {
        return;
    }
    let mut rgs = vec![0usize; n];
    let mut max_prefix = vec![0usize; n];
    loop {
        let nblocks = max_prefix[n - 1] + 1;
        let mut blocks = vec![0u64; nblocks];
        for (k, &b) in rgs.iter().enumerate() {
            blocks[b] |= 1 << k;
        }
        visit(&blocks);
        // increment the rightmost position that can grow
        let Some(i) = (1..n).rev().find(|&i| rgs[i] <= max_prefix[i - 1]) else {
            return;
        };
        rgs[i] += 1;
        max_prefix[i] = max_prefix[i - 1].max(rgs[i]);
        for k in i + 1..n {
            rgs[k] = 0;
            max_prefix[k] = max_prefix[i];
        }
    }
}

/// Per-pair qubitwise commutation vectors of the class generators.
pub fn class_constraints(class: &MubClass) -> Result<Vec<u64>> {
    if !class.is_abelian() {
        return Err(Error::NonAbelianClass(class.index));
    }
    let cols = class.generator_columns();
    let mut out = Vec::with_capacity(cols.len() * cols.len().saturating_sub(1) / 2);
    for i in 0..cols.len() {
        for k in i + 1..cols.len() {
            out.push(qubitwise_commutation_vector(&cols[i], &cols[k])?);
        }
    }
    Ok(out)
}

fn partition_respects(blocks: &[u64], constraints: &[u64]) -> bool {
    constraints
        .iter()
        .all(|&v| blocks.iter().all(|&b| (v & b).count_ones() % 2 == 0))
}

/// Finest partition with every constraint even on every block.
pub fn finest_partition_for_constraints(n: usize, constraints: &[u64]) -> Result<QubitPartition> {
    if n > MAX_PARTITION_QUBITS {
        return Err(Error::TooManyQubits {
            what: "partition search",
            n,
            max: MAX_PARTITION_QUBITS,
        });
    }
    // the single-block partition is valid exactly when every constraint is even
    if let Some(&odd) = constraints.iter().find(|c| c.count_ones() % 2 == 1) {
        return Err(Error::OddConstraint(odd));
    }
    let mut best: Vec<Vec<u64>> = Vec::new();
    let mut best_len = 0;
    for_each_set_partition(n, |blocks| {
        if !partition_respects(blocks, constraints) {
            return;
        }
        if blocks.len() > best_len {
            best_len = blocks.len();
            best.clear();
        }
        if blocks.len() == best_len {
            best.push(blocks.to_vec());
        }
    });
    let mut candidates = best
        .into_iter()
        .map(|b| QubitPartition::new(n, b))
        .collect::<Result<Vec<_>>>()?;
    match candidates.len() {
        1 => Ok(candidates.pop().expect("one candidate")),
        0 => unreachable!("single-block partition is valid for even constraints"),
        _ => Err(Error::AmbiguousPartition(
            candidates.iter().map(|p| p.to_string()).collect(),
        )),
    }
}

pub fn finest_partition(class: &MubClass) -> Result<QubitPartition> {
    finest_partition_for_constraints(class.n(), &class_constraints(class)?)
}

/// Integer partitions of `n` in structure-vector order: most blocks first,
/// ties broken lexicographically on sizes sorted descending. Each shape is
/// returned sorted ascending.
pub fn shape_order(n: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rem.min(max)).rev() {
            cur.push(part);
            rec(rem - part, part, cur, out);
            cur.pop();
        }
    }
    let mut desc = Vec::new();
    rec(n, n, &mut Vec::new(), &mut desc);
    desc.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    desc.into_iter()
        .map(|mut s| {
            s.reverse();
            s
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureVector {
    pub shapes: Vec<Vec<usize>>,
    pub counts: Vec<usize>,
}

impl StructureVector {
    pub fn from_shapes<'a>(n: usize, shapes: impl IntoIterator<Item = &'a Vec<usize>>) -> Self {
        let order = shape_order(n);
        let mut counts = vec![0; order.len()];
        for s in shapes {
            let pos = order
                .iter()
                .position(|o| o == s)
                .expect("shape of an n-qubit partition");
            counts[pos] += 1;
        }
        Self {
            shapes: order,
            counts,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

impl fmt::Display for StructureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", c.join(","))
    }
}

/// Finest partition of every class, in class order.
pub fn class_partitions(s: &CyclicMubSet) -> Result<Vec<QubitPartition>> {
    s.classes.par_iter().map(finest_partition).collect()
}

pub fn structure_vector(s: &CyclicMubSet) -> Result<StructureVector> {
    let parts = class_partitions(s)?;
    let shapes: Vec<Vec<usize>> = parts.iter().map(|p| p.shape()).collect();
    Ok(StructureVector::from_shapes(s.n(), &shapes))
}

/// Fills `s.structure`.
pub fn annotate(s: &mut CyclicMubSet) -> Result<()> {
    s.structure = Some(structure_vector(s)?);
    Ok(())
}
