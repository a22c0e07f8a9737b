//! Dense complex linear algebra: storage, Kronecker products, the matrix
//! exponential, a general eigensolver, proportionality fits and a fixed-step
//! integrator for linear matrix ODEs.

pub mod eig;
pub mod expm;
pub mod fit;
pub mod matrix;
pub mod ode;
pub mod random;
pub mod sparse;

pub use eig::{eig, eigenvalues, Eigen};
pub use expm::{expm, expm_generic, PadeOps};
pub use fit::{proportionality_fit, ProportionalityFit};
pub use matrix::{kron, CMatrix, C64, I, ONE, ZERO};
pub use ode::{ode_propagate, rk4_system};
pub use sparse::Csr;
