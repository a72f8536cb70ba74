//! Classical simulation of the (0+1)d generalized Sachdev-Ye-Kitaev model on
//! a spin register.
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`]: symplectic Pauli strings and sums, dense realisation and
//!   closed-form exponentials.
//! - [`dense`]: small dense complex matrices with Hermitian eigensolvers.
//! - [`syk`]: seeded random couplings, Jordan-Wigner Majoranas, the spin
//!   Hamiltonian and the boson pair operator.
//! - [`evolution`]: exact and first-order Trotter propagators and the
//!   fidelity surface over `(ln tau, log10 n)`.
//! - [`observables`]: thermal states and boson pair correlators, sample
//!   averages, late-time saturation and finite-size sweeps.
//! - [`compiler`]: reduction of k-body Pauli rotations to one- and two-body
//!   gates with resource counts.
//! - [`nmr`]: the four-spin NMR register, hard-pulse recipes and GRAPE.

// NaN-rejecting `!(x > 0.0)` guards are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compiler;
pub mod dense;
pub mod error;
pub mod evolution;
pub mod nmr;
pub mod observables;
pub mod pauli;
pub mod syk;

pub use dense::DenseOperator;
pub use error::{Error, Result};
pub use pauli::{PauliString, PauliSum};

pub use num_complex::Complex64 as C64;
