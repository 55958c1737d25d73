use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::quantum::{
    expectation, BlochVector, DensityMatrix, HamiltonianSpec, StateVector, TwoLevelParams,
    PURITY_TOLERANCE,
};
use crate::{Error, Result};

/// `dψ/dt = [-iωH₀ + γ(A - ⟨A⟩)]ψ`.
pub fn rhs_state(psi: &StateVector, spec: &HamiltonianSpec) -> Result<DVector<Complex64>> {
    psi.require_dim(spec.dim())?;
    let mean_a = expectation(spec.a(), psi)?;
    let amps = psi.amplitudes();
    let unitary = spec.h0().apply(amps)? * Complex64::new(0.0, -spec.omega());
    let collapse = (spec.a().apply(amps)? - amps * Complex64::new(mean_a, 0.0))
        * Complex64::new(spec.gamma(), 0.0);
    Ok(unitary + collapse)
}

/// `dρ/dt = -iω[H₀, ρ] + γ{A, ρ} - 2γ Tr(ρA) ρ`, defined for pure `ρ` only.
pub fn rhs_density(rho: &DensityMatrix, spec: &HamiltonianSpec) -> Result<DMatrix<Complex64>> {
    if rho.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: rho.dim(),
        });
    }
    let purity = rho.purity();
    if (purity - 1.0).abs() > PURITY_TOLERANCE {
        return Err(Error::NotPure(purity));
    }
    let r = rho.matrix();
    let h0 = spec.h0().matrix();
    let a = spec.a().matrix();
    let gamma = Complex64::new(spec.gamma(), 0.0);
    let commutator = h0 * r - r * h0;
    let anticommutator = a * r + r * a;
    let mean_a = (r * a).trace();
    Ok(commutator * Complex64::new(0.0, -spec.omega()) + anticommutator * gamma
        - r * (gamma * mean_a * 2.0))
}

/// Bloch-vector form of the evolution in the eigenbasis of `A`:
///
/// ```text
/// ẋ = -ω[(a₀ - d₀) y + 2 b₀ᵢ z] - γΔλ x z
/// ẏ =  ω[(a₀ - d₀) x - 2 b₀ᵣ z] - γΔλ y z
/// ż =  ω[2 b₀ᵢ x + 2 b₀ᵣ y]     - γΔλ (z² - 1)
/// ```
///
/// The collapse terms are written with `γΔλ` rather than `ω · (γ/ω)Δλ` so
/// that `ω = 0` is admissible.
pub fn rhs_bloch(v: &BlochVector, params: &TwoLevelParams, omega: f64, gamma: f64) -> [f64; 3] {
    bloch_derivative(v.as_array(), params, omega, gamma)
}

#[inline]
pub(crate) fn bloch_derivative(
    [x, y, z]: [f64; 3],
    p: &TwoLevelParams,
    omega: f64,
    gamma: f64,
) -> [f64; 3] {
    let split = p.a0 - p.d0;
    let rate = gamma * p.delta_lambda();
    [
        -omega * (split * y + 2.0 * p.b0i * z) - rate * x * z,
        omega * (split * x - 2.0 * p.b0r * z) - rate * y * z,
        omega * (2.0 * p.b0i * x + 2.0 * p.b0r * y) - rate * (z * z - 1.0),
    ]
}
