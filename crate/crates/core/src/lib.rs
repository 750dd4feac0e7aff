//! Simulation and training machinery for split-parallelized quantum
//! convolutional neural networks on translation-symmetric data.
//!
//! Conventions used throughout: qubit `q` is bit `q` of a basis index, a
//! rotation by `θ` about Pauli `P` is `exp(-iθP)`, and a measured bit `0`
//! contributes `z = +1`.

pub mod ansatz;
pub mod combinatorics;
pub mod estimation;
pub mod qsim;
pub mod rng;
pub mod spin;
pub mod tolerance;
pub mod training;
