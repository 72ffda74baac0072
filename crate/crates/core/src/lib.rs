//! Numerical laboratory for a qubit with a random but time-independent
//! Hamiltonian perturbation.
//!
//! One noise realization shifts the diagonal of a two-level Hamiltonian by y
//! and couples the levels with strength x; the dynamics of each realization
//! is a single oscillation around a realization-dependent stationary state
//! ([`closed_form`]). Averaging over compactly supported noise densities
//! ([`noise`], [`averaging`]) damps the oscillation and drives the mean state
//! to a final state determined by three coefficients (alpha, beta, gamma);
//! the decay rate of the deviation reflects the smoothness of the diagonal
//! density and the local structure of the coupling density at zero.
//! [`analysis`] extracts those rates, classifies weak/strong coupling
//! regimes, and compares the final state against pure dephasing channels.

// negated comparisons like `!(eta > 0.0)` are deliberate: they reject NaN
// parameters, which `eta <= 0.0` would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod averaging;
pub mod closed_form;
pub mod config;
pub mod error;
pub mod noise;
pub mod quadrature;
pub mod qubit;
pub mod validate;

pub use error::{Error, FitError, Result};
