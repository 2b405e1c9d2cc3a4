//! Second-order quantum moments and uncertainty relations on a truncated
//! single-mode Fock space.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, Hermitian eigendecomposition,
//!   unitary exponentials and characteristic coefficients.
//! * [`fock`]: ladder/quadrature operators and state constructors
//!   (vacuum, number, coherent, squeezed, superpositions, thermal).
//! * [`moments`]: expectations, variances, covariances, the covariance
//!   matrix σ, the commutator matrix C and the quantum covariance function.
//! * [`relations`]: Heisenberg, Schrödinger, characteristic, sum,
//!   canonical-sum, two-state and trace-class relations, plus the
//!   Williamson symplectic diagonalization.
//! * [`dynamics`]: degenerate parametric amplifier evolution and moment
//!   trajectories.
//! * [`explorer`]: minimum-uncertainty classification, gap objectives,
//!   Nelder–Mead minimization and parameter scans.

pub mod dynamics;
pub mod error;
pub mod explorer;
pub mod fock;
pub mod linalg;
pub mod moments;
pub mod relations;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Complex};
