//! Riemannian conjugate gradient on Hermitian positive semidefinite
//! matrices of fixed rank, through the embedded geometry and through the
//! quotient `C*^{n x p} / O_p` with three horizontal metrics.

pub mod cost;
pub mod embedded;
pub mod error;
pub mod kernel;
pub mod lowrank;
pub mod quotient;
pub mod random;
pub mod solver;
pub mod spectral;
pub mod bench;
