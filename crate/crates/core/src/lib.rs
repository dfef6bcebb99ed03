//! Moment-based certification of Wigner-function negativity.
//!
//! A genuine probability density satisfies `<f^2> >= 0` for every real
//! polynomial `f(x, p)`. The Wigner function of a quantum state need not, and
//! a negative value of `<f^2>_W` computed from finitely many Weyl-ordered
//! moments proves that `W` takes negative values somewhere.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: truncated Fock-space states, density matrices and the ladder,
//!   quadrature and number operators.
//! - [`weyl`]: Weyl-symmetrised moments `<x^n p^m>_W`, radial moments and
//!   phase-space grids of `W`.
//! - [`witness`]: polynomial witnesses, the tridiagonal fourth-moment
//!   eigenproblem, order-two scans and the rotationally invariant families.
//! - [`regularized`]: the power-law regularised wavefunction whose `(2xp)^2`
//!   moment approaches the lower bound `-1`.
//! - [`measurement`]: noisy detection, cumulant deconvolution and the
//!   harmonic-oscillator time-record simulator.
//!
//! Units are dimensionless quadratures with `[x, p] = i` (hbar = 1).

#![forbid(unsafe_code)]

pub mod eigen;
pub mod fock;
pub mod measurement;
pub mod quadrature;
pub mod regularized;
pub mod special;
pub mod state_spec;
pub mod weyl;
pub mod wigner;
pub mod witness;

mod error;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, FockState, Lattice, OperatorKind, OperatorMatrix};
pub use weyl::MomentTable;
pub use witness::{PolynomialWitness, WitnessReport};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
