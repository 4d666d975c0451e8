//! Numerical library for the conformally Hamiltonian reparametrization of
//! the Kepler problem and its regularization onto cotangent bundles of
//! quadrics: point maps, closed-form flows, momentum maps, the symmetry
//! algebroid, and a verification harness that certifies the structural
//! identities (symplecticity, equivariance, conservation, brackets) on
//! seeded random samples.

pub mod error;
pub mod gls;
pub mod kepler;
pub mod moser;
pub mod numerics;
pub mod reparam;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
