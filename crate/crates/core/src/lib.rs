//! Deterministic, non-unitary but norm-preserving two-level dynamics and its
//! coarse-grained stochastic (CSL) counterpart.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: states, Hermitian operators, Bloch vectors and the
//!   eigenbasis parameterisation of a two-level Hamiltonian.
//! - [`deterministic`]: the nonlinear evolution
//!   `dψ/dt = [-iωH₀ + γ(A - ⟨A⟩)]ψ`, its density-matrix and Bloch forms,
//!   the strong-coupling closed form, regime classification and collapse
//!   detection.
//! - [`stochastic`]: Wiener increments, the Itô CSL step, the Stratonovich
//!   coarse-grained step, trajectory simulation and the averaged Lindblad
//!   generator.
//! - [`analysis`]: Born-rule ensembles, Lindblad comparison and γ sweeps.
//! - [`cli`]: configuration parsing, CSV output and the command-line harness.

pub mod analysis;
pub mod cli;
pub mod deterministic;
mod error;
mod kernel;
pub mod quantum;
pub mod stochastic;

pub use error::{Error, Result};
