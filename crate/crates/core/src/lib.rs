//! Cyclic complete sets of mutually unbiased bases for `n` qubits.
//!
//! A single symplectic matrix `C` over Z₂ of order `2ⁿ + 1` generates all
//! `2ⁿ + 1` classes of commuting Pauli operators as `G_j = Cʲ G₀`. The crate
//! builds `C` from a triple `(B, R, A)`, certifies the resulting partition,
//! measures the entanglement structure of each basis, compiles `C` into a
//! Clifford circuit and checks everything numerically for small `n`.
//!
//! ```
//! use cyclic_mub::{entanglement, fixtures, mub};
//!
//! let g = fixtures::field3().generator().unwrap();
//! let mut set = mub::build_classes(&g).unwrap();
//! assert!(mub::validate_set(&set).is_valid());
//! entanglement::annotate(&mut set).unwrap();
//! assert_eq!(set.structure.unwrap().to_string(), "(3,0,6)");
//! ```

pub mod dense;
pub mod document;
pub mod entanglement;
pub mod error;
pub mod fixtures;
pub mod gf2;
pub mod mub;
pub mod pauli;
pub mod search;
pub mod sim;
pub mod synth;

pub use error::{Error, Result};
pub use gf2::{Gf2Matrix, Gf2Poly};
pub use mub::{CyclicGenerator, CyclicMubSet, GeneratorTriple, SetType};
pub use pauli::{PauliOp, SymplecticVector};
