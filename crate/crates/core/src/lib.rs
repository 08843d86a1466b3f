//! Exact toric geometry toolkit.
//!
//! Reflexive polytopes and their fans, toric fibrations, Calabi-Yau
//! hypersurface and complete intersection equations, Hodge numbers, GKZ
//! series, lattice-polarized K3 parameters and numeric monodromy.

pub mod cone;
pub mod cy;
pub mod error;
pub mod fan;
pub mod k3;
pub mod lattice;
pub mod monodromy;
pub mod poly;
pub mod polytope;

pub use error::{Error, Result};
pub use lattice::{IntMatrix, LatticeVector, Sublattice};
