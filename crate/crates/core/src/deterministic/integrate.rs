use num_complex::Complex64;

use super::collapse::CollapseSeries;
use super::rhs::bloch_derivative;
use crate::kernel::{bloch_of, is_finite, step_grid, EigenFrame, Qubit};
use crate::quantum::{BlochVector, HamiltonianSpec, StateVector, TwoLevelParams};
use crate::{Error, Result};

pub const DEFAULT_NORM_DRIFT_TOLERANCE: f64 = 1e-8;

/// Largest admissible `|‖v‖ - 1|` for the initial Bloch vector.
const BLOCH_INITIAL_TOLERANCE: f64 = 1e-6;

/// Fixed-step integration settings.
///
/// `dt = None` selects `0.01 / max(ω, |γ|Δλ)`. The step is shrunk if needed
/// so that an integer number of steps lands exactly on `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub dt: Option<f64>,
    pub t_end: f64,
    pub record_stride: usize,
    pub norm_drift_tolerance: f64,
}

impl IntegratorConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            dt: None,
            t_end,
            record_stride: 1,
            norm_drift_tolerance: DEFAULT_NORM_DRIFT_TOLERANCE,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_norm_drift_tolerance(mut self, tolerance: f64) -> Self {
        self.norm_drift_tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter("record_stride must be at least 1".into()));
        }
        if !(self.norm_drift_tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "norm_drift_tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Step count and uniform step size for `spec`.
    pub fn grid(&self, spec: &HamiltonianSpec) -> (usize, f64) {
        step_grid(self.t_end, self.dt.unwrap_or_else(|| spec.default_dt()))
    }
}

/// Recorded samples of a state-vector integration.
///
/// `states` are in the input basis; `bloch` and `exp_a` are computed in the
/// eigenbasis of `A`, so `z = +1` is the eigenstate of the larger eigenvalue.
/// `norm_drift[k]` is the largest pre-renormalisation `|‖ψ‖ - 1|` over the
/// steps since the previous sample (zero for the initial sample).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub bloch: Vec<BlochVector>,
    pub exp_a: Vec<f64>,
    pub norm_drift: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn last_bloch(&self) -> Option<BlochVector> {
        self.bloch.last().copied()
    }
}

impl CollapseSeries for Trajectory {
    fn sample_times(&self) -> &[f64] {
        &self.times
    }

    fn collapse_coordinates(&self) -> Vec<f64> {
        self.bloch.iter().map(BlochVector::z).collect()
    }
}

/// Recorded samples of a Bloch-vector integration. `sphere_deviation[k]` is
/// `|‖v‖ - 1|` at sample `k`; no renormalisation is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub bloch: Vec<BlochVector>,
    pub exp_a: Vec<f64>,
    pub sphere_deviation: Vec<f64>,
}

impl BlochTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_sphere_deviation(&self) -> f64 {
        self.sphere_deviation.iter().copied().fold(0.0, f64::max)
    }
}

impl CollapseSeries for BlochTrajectory {
    fn sample_times(&self) -> &[f64] {
        &self.times
    }

    fn collapse_coordinates(&self) -> Vec<f64> {
        self.bloch.iter().map(BlochVector::z).collect()
    }
}

#[inline]
fn state_derivative(frame: &EigenFrame, gamma: Complex64, q: &Qubit) -> Qubit {
    frame.generator * q + frame.centred_a(q) * gamma
}

/// Classic RK4 on the state equation with renormalisation after every step.
///
/// Fails with [`Error::StepSizeTooLarge`] as soon as a step's
/// pre-renormalisation drift exceeds `config.norm_drift_tolerance`, and with
/// [`Error::NonFinite`] if the state stops being finite.
pub fn integrate_deterministic(
    initial: &StateVector,
    spec: &HamiltonianSpec,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    initial.require_dim(spec.dim())?;
    let frame = EigenFrame::new(spec)?;
    let (n_steps, dt) = config.grid(spec);
    let gamma = Complex64::new(spec.gamma(), 0.0);
    let half = Complex64::new(0.5 * dt, 0.0);
    let full = Complex64::new(dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);

    let capacity = n_steps / config.record_stride + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        bloch: Vec::with_capacity(capacity),
        exp_a: Vec::with_capacity(capacity),
        norm_drift: Vec::with_capacity(capacity),
    };

    let mut q = frame.to_eigen(initial);
    let record = |traj: &mut Trajectory, t: f64, q: &Qubit, drift: f64| {
        traj.times.push(t);
        traj.states.push(frame.from_eigen(q));
        traj.bloch.push(bloch_of(q));
        traj.exp_a.push(frame.exp_a(q));
        traj.norm_drift.push(drift);
    };
    record(&mut traj, 0.0, &q, 0.0);

    let mut window_drift = 0.0_f64;
    for step in 1..=n_steps {
        let t = step as f64 * dt;
        let k1 = state_derivative(&frame, gamma, &q);
        let k2 = state_derivative(&frame, gamma, &(q + k1 * half));
        let k3 = state_derivative(&frame, gamma, &(q + k2 * half));
        let k4 = state_derivative(&frame, gamma, &(q + k3 * full));
        let next = q + (k1 + k2 * two + k3 * two + k4) * sixth;
        if !is_finite(&next) {
            return Err(Error::NonFinite(format!("state at t = {t} (dt = {dt})")));
        }
        let norm = next.norm();
        let drift = (norm - 1.0).abs();
        if drift > config.norm_drift_tolerance {
            return Err(Error::StepSizeTooLarge {
                t,
                drift,
                tolerance: config.norm_drift_tolerance,
            });
        }
        q = next.unscale(norm);
        window_drift = window_drift.max(drift);
        if step % config.record_stride == 0 || step == n_steps {
            record(&mut traj, t, &q, window_drift);
            window_drift = 0.0;
        }
    }
    Ok(traj)
}

/// Classic RK4 on the Bloch equations, without any projection back onto the
/// sphere. A step whose change in `‖v‖` exceeds `config.norm_drift_tolerance`
/// is reported as [`Error::StepSizeTooLarge`].
pub fn integrate_bloch(
    initial: &BlochVector,
    params: &TwoLevelParams,
    omega: f64,
    gamma: f64,
    config: &IntegratorConfig,
) -> Result<BlochTrajectory> {
    config.validate()?;
    if (initial.norm() - 1.0).abs() > BLOCH_INITIAL_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "initial Bloch vector must be on the unit sphere, |v| = {}",
            initial.norm()
        )));
    }
    let scale = omega.abs().max(gamma.abs() * params.delta_lambda());
    let dt_request = config
        .dt
        .unwrap_or(if scale > 0.0 { 0.01 / scale } else { 0.01 });
    let (n_steps, dt) = step_grid(config.t_end, dt_request);

    let capacity = n_steps / config.record_stride + 2;
    let mut traj = BlochTrajectory {
        times: Vec::with_capacity(capacity),
        bloch: Vec::with_capacity(capacity),
        exp_a: Vec::with_capacity(capacity),
        sphere_deviation: Vec::with_capacity(capacity),
    };
    let record = |traj: &mut BlochTrajectory, t: f64, v: [f64; 3]| {
        let b = BlochVector::new_unchecked(v[0], v[1], v[2]);
        traj.times.push(t);
        traj.exp_a.push(params.expectation_a(v[2]));
        traj.sphere_deviation.push((b.norm() - 1.0).abs());
        traj.bloch.push(b);
    };

    let f = |v: [f64; 3]| bloch_derivative(v, params, omega, gamma);
    let axpy = |v: [f64; 3], k: [f64; 3], h: f64| [v[0] + h * k[0], v[1] + h * k[1], v[2] + h * k[2]];
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();

    let mut v = initial.as_array();
    record(&mut traj, 0.0, v);
    for step in 1..=n_steps {
        let t = step as f64 * dt;
        let k1 = f(v);
        let k2 = f(axpy(v, k1, 0.5 * dt));
        let k3 = f(axpy(v, k2, 0.5 * dt));
        let k4 = f(axpy(v, k3, dt));
        let next: [f64; 3] =
            std::array::from_fn(|i| v[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        if next.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("Bloch vector at t = {t} (dt = {dt})")));
        }
        let drift = (norm(next) - norm(v)).abs();
        if drift > config.norm_drift_tolerance {
            return Err(Error::StepSizeTooLarge {
                t,
                drift,
                tolerance: config.norm_drift_tolerance,
            });
        }
        v = next;
        if step % config.record_stride == 0 || step == n_steps {
            record(&mut traj, t, v);
        }
    }
    Ok(traj)
}
