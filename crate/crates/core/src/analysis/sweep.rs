use crate::deterministic::{
    classify_regime, detect_collapse, integrate_deterministic, CollapseReport, IntegratorConfig,
    RegimeReport, Trajectory,
};
use crate::quantum::{BlochVector, HamiltonianSpec, Operator, StateVector};
use crate::{Error, Result};

/// Deterministic run at one coupling value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub regime: RegimeReport,
    pub collapse: CollapseReport,
    pub final_bloch: BlochVector,
    pub trajectory: Trajectory,
}

/// Integrates the deterministic dynamics once per `γ`, in the given order.
/// With `config.dt = None` each run uses its own default step.
pub fn gamma_sweep(
    initial: &StateVector,
    h0: &Operator,
    a: &Operator,
    omega: f64,
    gammas: &[f64],
    config: &IntegratorConfig,
    collapse_epsilon: f64,
) -> Result<Vec<SweepRow>> {
    if gammas.is_empty() {
        return Err(Error::InvalidParameter("gamma list is empty".into()));
    }
    gammas
        .iter()
        .map(|&gamma| {
            let spec = HamiltonianSpec::new(omega, h0.clone(), a.clone(), gamma)?;
            let trajectory = integrate_deterministic(initial, &spec, config)?;
            let final_bloch = *trajectory.bloch.last().expect("trajectory has an initial sample");
            Ok(SweepRow {
                gamma,
                regime: classify_regime(&spec)?,
                collapse: detect_collapse(&trajectory, collapse_epsilon),
                final_bloch,
                trajectory,
            })
        })
        .collect()
}
