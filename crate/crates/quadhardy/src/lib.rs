//! Symplectic flows of quadratic Hamiltonians, Williamson normal forms,
//! Wigner transforms, and Hardy-type uniqueness certificates.
//!
//! The crate answers one question numerically: given a Schrödinger
//! evolution generated by a real quadratic Hamiltonian and a solution with
//! Gaussian decay `|u(x, 0)| <= K e^{-alpha |x|^2}` and
//! `|u(x, T)| <= K e^{-beta |x|^2}`, is the pair of decay rates strong
//! enough to force `u = 0`? The criterion is spectral: with `B(T)` the
//! upper-right block of the classical flow at time `T`, the evolution
//! forces zero whenever `B(T)` is invertible and
//! `(2 hbar)^2 ||B(T)||_op^2 * alpha * beta > 1`.
//!
//! Module layout, bottom up:
//!
//! * [`symplectic`] — the standard form, validated symplectic matrices,
//!   free matrices, quadratic generating functions.
//! * [`expm`] — dense matrix exponential (scaling-and-squaring, Padé 13).
//! * [`williamson`] — symplectic diagonalization of positive definite
//!   matrices and the circular-function form of the flow it induces.
//! * [`hamiltonian`] — quadratic Hamiltonians, their `sp(2n)` generators,
//!   numerical and closed-form flows, built-in model presets.
//! * [`hardy`] — the decay certificate, its closed forms for the presets,
//!   and the reduction to a normalized lower-triangular model matrix.
//! * [`wigner`] — discrete cross-Wigner transforms, Gaussian phase-space
//!   states, metaplectic-style integral transforms on grids, and the
//!   phase-space covariance check that ties everything together.

pub mod error;
pub mod expm;
pub mod hamiltonian;
pub mod hardy;
pub mod symplectic;
pub mod wigner;
pub mod williamson;

pub use error::{Error, Result};
