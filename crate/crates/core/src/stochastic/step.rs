use num_complex::Complex64;

use super::{NoiseConfig, Scheme};
use crate::kernel::{is_finite, EigenFrame, Qubit};
use crate::quantum::{HamiltonianSpec, StateVector};
use crate::{Error, Result};

/// One SDE scheme bound to a two-level system in the eigenbasis of `A`.
#[derive(Debug, Clone)]
pub(crate) struct Propagator {
    pub frame: EigenFrame,
    rate: f64,
    sqrt_rate: f64,
    scheme: Scheme,
}

impl Propagator {
    pub fn new(spec: &HamiltonianSpec, rate: f64, scheme: Scheme) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "collapse rate must be non-negative, got {rate}"
            )));
        }
        Ok(Self {
            frame: EigenFrame::new(spec)?,
            rate,
            sqrt_rate: rate.sqrt(),
            scheme,
        })
    }

    pub fn from_noise(spec: &HamiltonianSpec, noise: &NoiseConfig) -> Result<Self> {
        noise.validate()?;
        Self::new(spec, noise.rate, noise.scheme)
    }

    /// Advances `q` by one step and renormalises. Returns the new state and
    /// the pre-renormalisation `|‖q‖ - 1|`.
    #[inline]
    pub fn step(&self, q: &Qubit, dw: f64, dt: f64) -> Result<(Qubit, f64)> {
        let next = match self.scheme {
            Scheme::Ito => self.ito(q, dw, dt),
            Scheme::Stratonovich => self.heun(q, dw, dt),
        };
        if !is_finite(&next) {
            return Err(Error::NonFinite(format!("stochastic state (dW = {dw}, dt = {dt})")));
        }
        let norm = next.norm();
        if norm == 0.0 {
            return Err(Error::NullState);
        }
        Ok((next.unscale(norm), (norm - 1.0).abs()))
    }

    /// `dq = [-iωH₀ dt - (Γ/2)(A - ⟨A⟩)² dt + √Γ (A - ⟨A⟩) dW] q`.
    #[inline]
    fn ito(&self, q: &Qubit, dw: f64, dt: f64) -> Qubit {
        let mean = self.frame.exp_a(q);
        let l = self.frame.lambda;
        let coefficient = |k: usize| {
            let x = l[k] - mean;
            Complex64::new(1.0 - 0.5 * self.rate * x * x * dt + self.sqrt_rate * x * dw, 0.0)
        };
        let unitary = self.frame.generator * q * Complex64::new(dt, 0.0);
        Qubit::new(q[0] * coefficient(0), q[1] * coefficient(1)) + unitary
    }

    /// Drift `[-iωH₀ - Γ(X² - ⟨X²⟩)] q` and diffusion `√Γ X q`, with
    /// `X = A - ⟨A⟩`.
    #[inline]
    fn stratonovich_fields(&self, q: &Qubit) -> (Qubit, Qubit) {
        let p0 = q[0].norm_sqr();
        let p1 = q[1].norm_sqr();
        let total = p0 + p1;
        let l = self.frame.lambda;
        let mean = (l[0] * p0 + l[1] * p1) / total;
        let x = [l[0] - mean, l[1] - mean];
        let variance = (p0 * x[0] * x[0] + p1 * x[1] * x[1]) / total;
        let drift = self.frame.generator * q
            + Qubit::new(
                q[0] * (-self.rate * (x[0] * x[0] - variance)),
                q[1] * (-self.rate * (x[1] * x[1] - variance)),
            );
        let diffusion = Qubit::new(q[0] * (self.sqrt_rate * x[0]), q[1] * (self.sqrt_rate * x[1]));
        (drift, diffusion)
    }

    /// Stochastic Heun: Euler predictor, then trapezoidal average of both
    /// fields with the same increment.
    #[inline]
    fn heun(&self, q: &Qubit, dw: f64, dt: f64) -> Qubit {
        let (f0, g0) = self.stratonovich_fields(q);
        let predictor = q + f0 * Complex64::new(dt, 0.0) + g0 * Complex64::new(dw, 0.0);
        let (f1, g1) = self.stratonovich_fields(&predictor);
        q + (f0 + f1) * Complex64::new(0.5 * dt, 0.0) + (g0 + g1) * Complex64::new(0.5 * dw, 0.0)
    }
}

fn single_step(
    psi: &StateVector,
    spec: &HamiltonianSpec,
    rate: f64,
    dw: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<(StateVector, f64)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    psi.require_dim(spec.dim())?;
    let propagator = Propagator::new(spec, rate, scheme)?;
    let q = propagator.frame.to_eigen(psi);
    let (next, norm_error) = propagator.step(&q, dw, dt)?;
    Ok((propagator.frame.from_eigen(&next), norm_error))
}

/// One Euler–Maruyama step of the Itô CSL equation
/// `dψ = [-iωH₀ dt - (Γ/2)(A - ⟨A⟩)² dt + √Γ (A - ⟨A⟩) dW] ψ`,
/// followed by renormalisation. Returns the new state and the
/// pre-renormalisation norm error.
pub fn ito_csl_step(
    psi: &StateVector,
    spec: &HamiltonianSpec,
    rate: f64,
    dw: f64,
    dt: f64,
) -> Result<(StateVector, f64)> {
    single_step(psi, spec, rate, dw, dt, Scheme::Ito)
}

/// One stochastic Heun step of the Stratonovich equation
/// `dψ = [-iωH₀ - Γ(X² - ⟨X²⟩)] ψ dt + √Γ X ψ ∘ dW`, `X = A - ⟨A⟩`,
/// followed by renormalisation.
pub fn stratonovich_step(
    psi: &StateVector,
    spec: &HamiltonianSpec,
    rate: f64,
    dw: f64,
    dt: f64,
) -> Result<(StateVector, f64)> {
    single_step(psi, spec, rate, dw, dt, Scheme::Stratonovich)
}
