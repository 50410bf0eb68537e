//! Numerical laboratory for k-commutants of free-fermion unitary ensembles.

pub mod effham;
pub mod ensemble;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod liealg;
pub mod linalg;
pub mod moments;
pub mod pauli;

pub use error::{Error, Result};
