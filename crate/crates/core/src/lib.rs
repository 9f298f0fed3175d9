//! Entanglement structure of stabilizer states over GF(2).
//!
//! Pauli operators are vectors in the symplectic space G^n = GF(2)^{2n},
//! stored as an X half and a Z half. Stabilizer states are isotropic
//! subspaces of dimension n together with a sign per generator.

pub mod cli;
pub mod clifford;
pub mod extraction;
pub mod gf2;
pub mod models;
pub mod stabilizer;
pub mod symplectic;

pub use clifford::{CliffordCircuit, CliffordError, Gate, StateComparison, Tableau};
pub use gf2::{BinarySubspace, BitVector, Gf2Error};
pub use symplectic::{PauliVector, SymplecticError, SymplecticMap};
