use nalgebra::DVector;
use num_complex::Complex64;

use super::{DensityMatrix, Operator, ONE, ZERO};
use crate::{Error, Result};

/// A unit-norm state vector with `n >= 2` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

/// Scales `phi` to unit norm.
///
/// Inputs whose squared norm is already within a few ulps of one are returned
/// unchanged, which makes the operation idempotent bit-for-bit.
pub fn normalize(phi: &DVector<Complex64>) -> Result<StateVector> {
    if phi.len() < 2 {
        return Err(Error::DimensionTooSmall(phi.len()));
    }
    let norm_sqr = phi.norm_squared();
    if !norm_sqr.is_finite() {
        return Err(Error::NonFinite("state amplitudes".into()));
    }
    if norm_sqr == 0.0 {
        return Err(Error::NullState);
    }
    if (norm_sqr - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(StateVector {
            amplitudes: phi.clone(),
        });
    }
    Ok(StateVector {
        amplitudes: phi.unscale(norm_sqr.sqrt()),
    })
}

/// `⟨ψ|A|ψ⟩` for Hermitian `A`.
pub fn expectation(a: &Operator, psi: &StateVector) -> Result<f64> {
    let a_psi = a.apply(&psi.amplitudes)?;
    Ok(psi.amplitudes.dotc(&a_psi).re)
}

impl StateVector {
    /// Normalizes arbitrary amplitudes into a state.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        normalize(&DVector::from_vec(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|k⟩` in dimension `n`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        if k >= n {
            return Err(Error::DimensionMismatch { expected: n, found: k + 1 });
        }
        Ok(Self {
            amplitudes: DVector::from_fn(n, |i, _| if i == k { ONE } else { ZERO }),
        })
    }

    pub fn ket0() -> Self {
        Self::two_level(ONE, ZERO)
    }

    pub fn ket1() -> Self {
        Self::two_level(ZERO, ONE)
    }

    /// `(|0⟩ + |1⟩)/√2`, the point `(1, 0, 0)` on the Bloch sphere.
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::two_level(h, h)
    }

    pub fn minus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::two_level(h, -h)
    }

    /// `cos θ |0⟩ + sin θ |1⟩`.
    pub fn from_angle(theta: f64) -> Self {
        Self::two_level(
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(theta.sin(), 0.0),
        )
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`, the Bloch point
    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_bloch_angles(theta: f64, phi: f64) -> Self {
        Self::two_level(
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        )
    }

    /// Wraps amplitudes already known to be unit norm.
    pub(crate) fn from_normalized(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    fn two_level(c0: Complex64, c1: Complex64) -> Self {
        Self {
            amplitudes: DVector::from_vec(vec![c0, c1]),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.amplitudes[k]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `|c_k|²` for every basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(&self.amplitudes * self.amplitudes.adjoint())
    }

    pub(crate) fn require_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            });
        }
        Ok(())
    }
}
