use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::born_probabilities;
use crate::deterministic::{CollapseReport, CollapseTracker, DEFAULT_COLLAPSE_EPSILON};
use crate::kernel::{step_grid, z_of};
use crate::quantum::{HamiltonianSpec, StateVector};
use crate::stochastic::{trajectory_rng, NoiseConfig, Propagator};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub n_trajectories: usize,
    pub t_end: f64,
    /// Times at which moments of `z` are collected; each is snapped to the
    /// nearest step.
    pub checkpoints: Vec<f64>,
    pub collapse_epsilon: f64,
}

impl EnsembleConfig {
    pub fn new(n_trajectories: usize, t_end: f64) -> Self {
        Self {
            n_trajectories,
            t_end,
            checkpoints: Vec::new(),
            collapse_epsilon: DEFAULT_COLLAPSE_EPSILON,
        }
    }

    pub fn with_checkpoints(mut self, checkpoints: Vec<f64>) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    pub fn with_collapse_epsilon(mut self, epsilon: f64) -> Self {
        self.collapse_epsilon = epsilon;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZMoments {
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOutcome {
    pub index: u64,
    pub final_z: f64,
    pub collapse: CollapseReport,
}

/// Aggregate outcome of an ensemble of CSL trajectories.
///
/// Trajectories still uncollapsed at `t_end` are counted separately and are
/// excluded from `fraction_0`, which is `count_to_0 / (count_to_0 + count_to_1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub n_trajectories: usize,
    pub count_to_0: usize,
    pub count_to_1: usize,
    pub count_uncollapsed: usize,
    pub fraction_0: Option<f64>,
    /// Normal-approximation 95% interval for `fraction_0`, clamped to `[0, 1]`.
    pub fraction_0_ci: Option<(f64, f64)>,
    pub born_p0: f64,
    pub z_moments: Vec<ZMoments>,
    pub outcomes: Vec<TrajectoryOutcome>,
}

impl EnsembleStats {
    pub fn collapsed(&self) -> usize {
        self.count_to_0 + self.count_to_1
    }

    pub fn uncollapsed_fraction(&self) -> f64 {
        self.count_uncollapsed as f64 / self.n_trajectories as f64
    }

    /// Binomial standard deviation of `fraction_0` under the Born weight.
    pub fn born_sigma(&self) -> f64 {
        let n = self.collapsed().max(1) as f64;
        (self.born_p0 * (1.0 - self.born_p0) / n).sqrt()
    }

    /// `|fraction_0 - p₀| <= k σ`.
    pub fn within_born_sigmas(&self, k: f64) -> bool {
        match self.fraction_0 {
            Some(f) => (f - self.born_p0).abs() <= k * self.born_sigma(),
            None => false,
        }
    }
}

/// `p̂ ± 1.96 √(p̂(1 - p̂)/n)`, clamped to `[0, 1]`.
pub fn binomial_ci_95(successes: usize, n: usize) -> Option<(f64, f64)> {
    if n == 0 {
        return None;
    }
    let p = successes as f64 / n as f64;
    let half = 1.96 * (p * (1.0 - p) / n as f64).sqrt();
    Some(((p - half).max(0.0), (p + half).min(1.0)))
}

struct PathSummary {
    final_z: f64,
    collapse: CollapseReport,
    checkpoint_z: Vec<f64>,
}

/// Runs `config.n_trajectories` CSL trajectories (trajectory `i` on stream
/// `i` of `noise.seed`) and classifies each by the collapse criterion applied
/// at every step. Trajectories run in parallel; all reductions happen in
/// index order, so results do not depend on scheduling.
pub fn run_ensemble(
    initial: &StateVector,
    spec: &HamiltonianSpec,
    noise: &NoiseConfig,
    config: &EnsembleConfig,
) -> Result<EnsembleStats> {
    if config.n_trajectories == 0 {
        return Err(Error::Ensemble("n_trajectories must be at least 1".into()));
    }
    if !(config.t_end > 0.0 && config.t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be positive, got {}", config.t_end)));
    }
    if let Some(bad) = config.checkpoints.iter().find(|&&t| !(0.0..=config.t_end).contains(&t)) {
        return Err(Error::InvalidParameter(format!("checkpoint {bad} lies outside [0, t_end]")));
    }
    if !(config.collapse_epsilon > 0.0 && config.collapse_epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "collapse epsilon must lie in (0, 1), got {}",
            config.collapse_epsilon
        )));
    }
    initial.require_dim(2)?;
    let propagator = Propagator::from_noise(spec, noise)?;
    let (born_p0, _) = born_probabilities(initial, spec.a())?;
    let (n_steps, dt) = step_grid(config.t_end, noise.dt);
    let checkpoint_steps: Vec<usize> = config
        .checkpoints
        .iter()
        .map(|t| ((t / dt).round() as usize).min(n_steps))
        .collect();
    let q0 = propagator.frame.to_eigen(initial);

    let summaries: Vec<PathSummary> = (0..config.n_trajectories as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = trajectory_rng(noise.seed, index);
            let sqrt_dt = dt.sqrt();
            let mut tracker = CollapseTracker::new(config.collapse_epsilon);
            let mut checkpoint_z = vec![0.0; checkpoint_steps.len()];
            let mut q = q0;
            let mut z = z_of(&q);
            tracker.observe(0.0, z);
            let fill = |step: usize, z: f64, out: &mut Vec<f64>| {
                for (slot, &s) in out.iter_mut().zip(&checkpoint_steps) {
                    if s == step {
                        *slot = z;
                    }
                }
            };
            fill(0, z, &mut checkpoint_z);
            for step in 1..=n_steps {
                let dw = rng.sample::<f64, _>(StandardNormal) * sqrt_dt;
                q = propagator.step(&q, dw, dt)?.0;
                z = z_of(&q);
                tracker.observe(step as f64 * dt, z);
                fill(step, z, &mut checkpoint_z);
            }
            Ok(PathSummary {
                final_z: z,
                collapse: tracker.report(),
                checkpoint_z,
            })
        })
        .collect::<Result<_>>()?;

    let mut stats = EnsembleStats {
        n_trajectories: config.n_trajectories,
        count_to_0: 0,
        count_to_1: 0,
        count_uncollapsed: 0,
        fraction_0: None,
        fraction_0_ci: None,
        born_p0,
        z_moments: Vec::with_capacity(checkpoint_steps.len()),
        outcomes: Vec::with_capacity(config.n_trajectories),
    };
    for (index, s) in summaries.iter().enumerate() {
        match s.collapse.target_index {
            Some(0) => stats.count_to_0 += 1,
            Some(_) => stats.count_to_1 += 1,
            None => stats.count_uncollapsed += 1,
        }
        stats.outcomes.push(TrajectoryOutcome {
            index: index as u64,
            final_z: s.final_z,
            collapse: s.collapse,
        });
    }
    let collapsed = stats.collapsed();
    if collapsed > 0 {
        stats.fraction_0 = Some(stats.count_to_0 as f64 / collapsed as f64);
        stats.fraction_0_ci = binomial_ci_95(stats.count_to_0, collapsed);
    }

    let n = summaries.len() as f64;
    for (k, &step) in checkpoint_steps.iter().enumerate() {
        let mean = summaries.iter().map(|s| s.checkpoint_z[k]).sum::<f64>() / n;
        let variance = if summaries.len() > 1 {
            summaries.iter().map(|s| (s.checkpoint_z[k] - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        stats.z_moments.push(ZMoments {
            t: step as f64 * dt,
            mean,
            variance,
            std_error: (variance / n).sqrt(),
        });
    }
    Ok(stats)
}
