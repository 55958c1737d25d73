//! Ensemble statistics over the stochastic dynamics, comparison with the
//! averaged master equation, and coupling sweeps over the deterministic one.

mod born;
mod ensemble;
mod lindblad_compare;
mod sweep;

pub use born::born_probabilities;
pub use ensemble::{
    binomial_ci_95, run_ensemble, EnsembleConfig, EnsembleStats, TrajectoryOutcome, ZMoments,
};
pub use lindblad_compare::{
    compare_to_lindblad, LindbladCheckpoint, LindbladComparison, MIN_LINDBLAD_TRAJECTORIES,
};
pub use sweep::{gamma_sweep, SweepRow};
