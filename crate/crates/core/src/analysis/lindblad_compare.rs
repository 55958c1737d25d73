use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::quantum::{DensityMatrix, HamiltonianSpec};
use crate::stochastic::{integrate_lindblad, StochasticTrajectory};
use crate::{Error, Result};

pub const MIN_LINDBLAD_TRAJECTORIES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladCheckpoint {
    pub t: f64,
    /// Ensemble mean of `|ψ⟩⟨ψ|`.
    pub averaged: DMatrix<Complex64>,
    /// RK4 solution of the master equation from the averaged initial state.
    pub reference: DMatrix<Complex64>,
    pub frobenius_deviation: f64,
    /// Monte-Carlo standard error of `averaged` in Frobenius norm,
    /// `√(Σᵢⱼ Var(ρᵢⱼ) / N)`.
    pub standard_error: f64,
}

impl LindbladCheckpoint {
    pub fn averaged_coherence(&self) -> f64 {
        self.averaged[(0, 1)].norm()
    }

    pub fn reference_coherence(&self) -> f64 {
        self.reference[(0, 1)].norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladComparison {
    pub n_trajectories: usize,
    pub checkpoints: Vec<LindbladCheckpoint>,
}

impl LindbladComparison {
    pub fn max_deviation(&self) -> f64 {
        self.checkpoints
            .iter()
            .map(|c| c.frobenius_deviation)
            .fold(0.0, f64::max)
    }
}

/// Averages `|ψ⟩⟨ψ|` over the ensemble at every recorded time and compares it
/// with the master equation integrated by RK4. All trajectories must share
/// the same recorded times.
pub fn compare_to_lindblad(
    ensemble: &[StochasticTrajectory],
    spec: &HamiltonianSpec,
    rate: f64,
) -> Result<LindbladComparison> {
    let Some(first) = ensemble.first() else {
        return Err(Error::Ensemble("empty ensemble".into()));
    };
    if ensemble.len() < MIN_LINDBLAD_TRAJECTORIES {
        return Err(Error::Ensemble(format!(
            "{} trajectories given, at least {MIN_LINDBLAD_TRAJECTORIES} required",
            ensemble.len()
        )));
    }
    if ensemble.iter().any(|t| t.times != first.times) {
        return Err(Error::Ensemble("trajectories are recorded on different time grids".into()));
    }
    let dim = spec.dim();
    if first.states.first().map(|s| s.dim()) != Some(dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: first.states.first().map_or(0, |s| s.dim()),
        });
    }

    let n = ensemble.len() as f64;
    let mut averaged = Vec::with_capacity(first.len());
    let mut errors = Vec::with_capacity(first.len());
    for k in 0..first.len() {
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        let mut sum_sq = DMatrix::<f64>::zeros(dim, dim);
        for traj in ensemble {
            let rho = traj.states[k].to_density();
            sum += rho.matrix();
            sum_sq += rho.matrix().map(|c| c.norm_sqr());
        }
        let mean = sum.unscale(n);
        let variance: f64 = sum_sq
            .iter()
            .zip(mean.iter())
            .map(|(s, m)| (s / n - m.norm_sqr()).max(0.0) * n / (n - 1.0))
            .sum();
        errors.push((variance / n).sqrt());
        averaged.push(mean);
    }

    let scale = (spec.omega().abs() * spec.h0().matrix().norm())
        .max(rate * spec.spectral_width().powi(2))
        .max(1.0);
    let rho0 = DensityMatrix::new(averaged[0].clone())?;
    let reference = integrate_lindblad(&rho0, spec, rate, &first.times, 0.01 / scale)?;

    let checkpoints = first
        .times
        .iter()
        .zip(averaged)
        .zip(reference)
        .zip(errors)
        .map(|(((&t, averaged), reference), standard_error)| {
            let reference = reference.matrix().clone();
            LindbladCheckpoint {
                t,
                frobenius_deviation: (&averaged - &reference).norm(),
                averaged,
                reference,
                standard_error,
            }
        })
        .collect();
    Ok(LindbladComparison {
        n_trajectories: ensemble.len(),
        checkpoints,
    })
}
