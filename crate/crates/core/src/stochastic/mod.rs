//! Coarse-grained stochastic dynamics: the CSL equation with a single
//! collapse operator, in Itô form (Euler–Maruyama) and in the Stratonovich
//! form produced by the coarse-graining map (stochastic Heun), together with
//! the Lindblad generator that governs the noise-averaged density matrix.

mod lindblad;
mod noise;
mod simulate;
mod step;

pub use lindblad::{integrate_lindblad, lindblad_rhs};
pub use noise::{trajectory_rng, wiener_increments, NoiseConfig, Scheme, RNG_DESCRIPTION};
pub use simulate::{simulate_ensemble, simulate_stochastic, simulate_stochastic_path, StochasticTrajectory};
pub use step::{ito_csl_step, stratonovich_step};

pub(crate) use step::Propagator;
