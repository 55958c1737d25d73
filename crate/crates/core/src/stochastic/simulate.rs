use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::noise::trajectory_rng;
use super::{NoiseConfig, Propagator};
use crate::deterministic::CollapseSeries;
use crate::kernel::{bloch_of, step_grid};
use crate::quantum::{BlochVector, HamiltonianSpec, StateVector};
use crate::{Error, Result};

/// Recorded samples of one noise realisation.
///
/// `states` are in the input basis, `bloch` in the eigenbasis of `A`.
/// `wiener_path[k]` is the accumulated `W(t_k)`; `norm_error[k]` is the
/// largest pre-renormalisation `|‖ψ‖ - 1|` since the previous sample.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub bloch: Vec<BlochVector>,
    pub exp_a: Vec<f64>,
    pub wiener_path: Vec<f64>,
    pub norm_error: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl StochasticTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_norm_error(&self) -> f64 {
        self.norm_error.iter().copied().fold(0.0, f64::max)
    }
}

impl CollapseSeries for StochasticTrajectory {
    fn sample_times(&self) -> &[f64] {
        &self.times
    }

    fn collapse_coordinates(&self) -> Vec<f64> {
        self.bloch.iter().map(BlochVector::z).collect()
    }
}

/// Single trajectory on stream 0 of `noise.seed`, recording every step.
pub fn simulate_stochastic(
    initial: &StateVector,
    spec: &HamiltonianSpec,
    noise: &NoiseConfig,
    t_end: f64,
) -> Result<StochasticTrajectory> {
    simulate_stochastic_path(initial, spec, noise, t_end, 0, 1)
}

/// Trajectory on stream `stream` of `noise.seed`, recording every
/// `record_stride` steps plus the final one.
pub fn simulate_stochastic_path(
    initial: &StateVector,
    spec: &HamiltonianSpec,
    noise: &NoiseConfig,
    t_end: f64,
    stream: u64,
    record_stride: usize,
) -> Result<StochasticTrajectory> {
    let propagator = Propagator::from_noise(spec, noise)?;
    run_path(&propagator, initial, noise, t_end, stream, record_stride)
}

/// `n_trajectories` independent realisations, trajectory `i` on stream `i`.
/// Runs in parallel; the result is ordered by index and identical to a
/// sequential run.
pub fn simulate_ensemble(
    initial: &StateVector,
    spec: &HamiltonianSpec,
    noise: &NoiseConfig,
    t_end: f64,
    n_trajectories: usize,
    record_stride: usize,
) -> Result<Vec<StochasticTrajectory>> {
    let propagator = Propagator::from_noise(spec, noise)?;
    (0..n_trajectories as u64)
        .into_par_iter()
        .map(|i| run_path(&propagator, initial, noise, t_end, i, record_stride))
        .collect()
}

fn run_path(
    propagator: &Propagator,
    initial: &StateVector,
    noise: &NoiseConfig,
    t_end: f64,
    stream: u64,
    record_stride: usize,
) -> Result<StochasticTrajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be positive, got {t_end}")));
    }
    if record_stride == 0 {
        return Err(Error::InvalidParameter("record_stride must be at least 1".into()));
    }
    initial.require_dim(2)?;
    let frame = &propagator.frame;
    let (n_steps, dt) = step_grid(t_end, noise.dt);
    let sqrt_dt = dt.sqrt();
    let mut rng = trajectory_rng(noise.seed, stream);

    let capacity = n_steps / record_stride + 2;
    let mut traj = StochasticTrajectory {
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        bloch: Vec::with_capacity(capacity),
        exp_a: Vec::with_capacity(capacity),
        wiener_path: Vec::with_capacity(capacity),
        norm_error: Vec::with_capacity(capacity),
        seed: noise.seed,
        stream,
    };
    let mut q = frame.to_eigen(initial);
    let mut w = 0.0;
    let mut window_error = 0.0_f64;
    let record = |traj: &mut StochasticTrajectory, t: f64, q: &_, w: f64, err: f64| {
        traj.times.push(t);
        traj.states.push(frame.from_eigen(q));
        traj.bloch.push(bloch_of(q));
        traj.exp_a.push(frame.exp_a(q));
        traj.wiener_path.push(w);
        traj.norm_error.push(err);
    };
    record(&mut traj, 0.0, &q, 0.0, 0.0);

    for step in 1..=n_steps {
        let dw = rng.sample::<f64, _>(StandardNormal) * sqrt_dt;
        let (next, err) = propagator.step(&q, dw, dt)?;
        q = next;
        w += dw;
        window_error = window_error.max(err);
        if step % record_stride == 0 || step == n_steps {
            record(&mut traj, step as f64 * dt, &q, w, window_error);
            window_error = 0.0;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deterministic::{integrate_deterministic, IntegratorConfig};
    use crate::stochastic::{wiener_increments, Scheme};

    fn noise(rate: f64) -> NoiseConfig {
        NoiseConfig::new(rate, 11, Scheme::Ito, 1e-3)
    }

    #[test]
    fn eigenstate_is_constant() {
        let traj = simulate_stochastic(&StateVector::ket0(), &HamiltonianSpec::pure_collapse(0.0), &noise(10.0), 1.0).unwrap();
        assert!(traj.states.iter().all(|s| s == &StateVector::ket0()));
        assert!(traj.exp_a.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn reproducible_bit_for_bit() {
        let spec = HamiltonianSpec::sigma_x_sigma_z(1.0, 0.0);
        for scheme in [Scheme::Ito, Scheme::Stratonovich] {
            let cfg = noise(3.0).with_scheme(scheme);
            let a = simulate_stochastic(&StateVector::plus(), &spec, &cfg, 0.5).unwrap();
            let b = simulate_stochastic(&StateVector::plus(), &spec, &cfg, 0.5).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn wiener_path_is_the_running_sum_of_the_increments() {
        let cfg = noise(2.0);
        let traj = simulate_stochastic(&StateVector::plus(), &HamiltonianSpec::pure_collapse(0.0), &cfg, 0.1).unwrap();
        let increments = wiener_increments(cfg.seed, traj.len() - 1, cfg.dt);
        let mut w = 0.0;
        for (k, dw) in increments.iter().enumerate() {
            w += dw;
            assert_eq!(traj.wiener_path[k + 1], w);
        }
        assert_eq!(traj.seed, cfg.seed);
    }

    #[test]
    fn unit_norm_and_bounded_expectation() {
        let spec = HamiltonianSpec::sigma_x_sigma_z(1.0, 0.0);
        let traj = simulate_stochastic(&StateVector::from_angle(0.4), &spec, &noise(5.0), 1.0).unwrap();
        for (s, a) in traj.states.iter().zip(&traj.exp_a) {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            assert!(*a <= 1.0 + 1e-12 && *a >= -1.0 - 1e-12);
        }
    }

    #[test]
    fn strong_collapse_completes() {
        let spec = HamiltonianSpec::pure_collapse(0.0);
        let rate = 10.0;
        let paths = simulate_ensemble(&StateVector::plus(), &spec, &noise(rate), 5.0 / rate, 400, 1000).unwrap();
        let done = paths.iter().filter(|p| p.bloch.last().unwrap().z().abs() >= 0.99).count();
        assert!(done as f64 >= 0.99 * paths.len() as f64, "{done}");
    }

    #[test]
    fn zero_rate_matches_the_deterministic_unitary_flow() {
        let spec = HamiltonianSpec::sigma_x_sigma_z(1.0, 0.0);
        let dt = 1e-6;
        let traj = simulate_stochastic_path(
            &StateVector::ket0(),
            &spec,
            &NoiseConfig::new(0.0, 1, Scheme::Stratonovich, dt),
            0.5,
            0,
            1000,
        )
        .unwrap();
        let reference = integrate_deterministic(
            &StateVector::ket0(),
            &spec,
            &IntegratorConfig::new(0.5).with_dt(1e-3),
        )
        .unwrap();
        for (a, b) in traj.bloch.iter().zip(&reference.bloch) {
            assert!(a.distance(b) < 1e-6, "{a:?} {b:?}");
        }
    }

    #[test]
    fn ensemble_matches_sequential_runs() {
        let spec = HamiltonianSpec::pure_collapse(0.0);
        let cfg = noise(4.0);
        let ens = simulate_ensemble(&StateVector::plus(), &spec, &cfg, 0.2, 8, 10).unwrap();
        for (i, path) in ens.iter().enumerate() {
            let single = simulate_stochastic_path(&StateVector::plus(), &spec, &cfg, 0.2, i as u64, 10).unwrap();
            assert_eq!(path, &single);
        }
    }
}
