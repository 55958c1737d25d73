//! Complex linear-algebra primitives and quantum-state representations.
//!
//! Everything here is an immutable value once constructed. Constructors
//! validate their invariants (unit norm, Hermiticity, unit trace, a
//! non-degenerate collapse operator), so downstream dynamics can assume them.

mod bloch;
mod hamiltonian;
mod operator;
mod state;

pub use bloch::{bloch_to_density, density_to_bloch, state_to_bloch, BlochVector, DensityMatrix};
pub use hamiltonian::{to_eigenbasis_of_a, HamiltonianSpec, TwoLevelParams};
pub use operator::{hermitian_deviation, Operator};
pub use state::{expectation, normalize, StateVector};

pub use num_complex::Complex64;

/// Reduced Planck constant in simulation units.
pub const HBAR: f64 = 1.0;

/// Absolute tolerance for Hermiticity checks.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Tolerance on `|‖ψ‖² - 1|` for a valid state and on `|Tr ρ - 1|`.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Minimum eigenvalue gap of the collapse operator `A`.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Largest admissible `|1 - Tr ρ²|` for a density matrix treated as pure.
pub const PURITY_TOLERANCE: f64 = 1e-8;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);
