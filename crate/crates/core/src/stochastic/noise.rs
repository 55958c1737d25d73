use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Generator used for every Wiener increment; written into output metadata.
pub const RNG_DESCRIPTION: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64(seed), stream = trajectory index";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Euler–Maruyama on the Itô CSL equation.
    Ito,
    /// Stochastic Heun on the Stratonovich equation from the coarse-graining map.
    Stratonovich,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Ito => "ito",
            Scheme::Stratonovich => "stratonovich",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ito" => Ok(Scheme::Ito),
            "stratonovich" => Ok(Scheme::Stratonovich),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheme `{other}` (expected `ito` or `stratonovich`)"
            ))),
        }
    }
}

/// CSL rate `Γ`, base seed, scheme and step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub rate: f64,
    pub seed: u64,
    pub scheme: Scheme,
    pub dt: f64,
}

impl NoiseConfig {
    pub fn new(rate: f64, seed: u64, scheme: Scheme, dt: f64) -> Self {
        Self {
            rate,
            seed,
            scheme,
            dt,
        }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "collapse rate must be non-negative, got {}",
                self.rate
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

/// Independent random stream for trajectory `index` under `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `n_steps` i.i.d. `N(0, dt)` increments from stream 0 of `seed`.
///
/// These are exactly the increments consumed by
/// [`simulate_stochastic`](super::simulate_stochastic) for the same seed and
/// step.
pub fn wiener_increments(seed: u64, n_steps: usize, dt: f64) -> Vec<f64> {
    let mut rng = trajectory_rng(seed, 0);
    let scale = dt.sqrt();
    (0..n_steps)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
        .collect()
}
