//! Deterministic, non-unitary, norm-preserving evolution
//! `dψ/dt = [-iωH₀ + γ(A - ⟨A⟩)]ψ` and its diagnostics.

mod collapse;
mod integrate;
mod regime;
mod rhs;
mod strong;

pub use collapse::{detect_collapse, CollapseReport, CollapseSeries, DEFAULT_COLLAPSE_EPSILON};
pub(crate) use collapse::CollapseTracker;
pub use integrate::{
    integrate_bloch, integrate_deterministic, BlochTrajectory, IntegratorConfig, Trajectory,
    DEFAULT_NORM_DRIFT_TOLERANCE,
};
pub use regime::{classify_regime, Regime, RegimeReport};
pub use rhs::{rhs_bloch, rhs_density, rhs_state};
pub use strong::{analytic_z_strong_coupling, analytic_z_strong_coupling_with, StrongCouplingRate};
