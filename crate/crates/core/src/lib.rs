//! Heralded Schrödinger-cat state generation by photon-number measurement
//! on one mode of a two-mode Gaussian state.
//!
//! The crate is organised bottom-up:
//!
//! - [`special_fn`]: Hermite functions, log-factorials and Gauss-Hermite
//!   quadrature.
//! - [`gauss_core`]: the real symmetric matrix `σ` in the two-mode
//!   wavefunction exponent `exp(-xᵀσx/2)`, built from two squeezers and a
//!   beam splitter, plus the `σ11 = 1` reflectance solver.
//! - [`herald`]: heralded wavefunctions and success probabilities, both in
//!   closed form (at `σ11 = 1`) and by direct quadrature for any `σ`.
//! - [`targets`]: squeezed cat states and fidelities.
//! - [`oracle`]: an independent truncated two-mode Fock-space simulation.
//! - [`compare`]: success-probability comparison against homodyne
//!   conditioning and conventional photon subtraction, and parameter sweeps.
//!
//! Quadratures follow `x = (a + a†)/√2`, so the vacuum wavefunction is
//! `π^{-1/4} exp(-x²/2)` and the vacuum `σ` is the identity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod error;
pub mod gauss_core;
pub mod herald;
pub mod oracle;
pub mod special_fn;
pub mod targets;
pub mod wavefunction;

pub use error::{Error, Result};
