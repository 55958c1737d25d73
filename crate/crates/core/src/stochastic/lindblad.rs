use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::kernel::step_grid;
use crate::quantum::{DensityMatrix, HamiltonianSpec};
use crate::{Error, Result};

/// `dρ/dt = -iω[H₀, ρ] + Γ(AρA - ½{A², ρ})`, the master equation obeyed by
/// the noise average `E[|ψ⟩⟨ψ|]` of the CSL equation. Valid for mixed `ρ`.
pub fn lindblad_rhs(rho: &DensityMatrix, spec: &HamiltonianSpec, rate: f64) -> Result<DMatrix<Complex64>> {
    if rho.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: rho.dim(),
        });
    }
    Ok(generator(rho.matrix(), spec, rate))
}

fn generator(r: &DMatrix<Complex64>, spec: &HamiltonianSpec, rate: f64) -> DMatrix<Complex64> {
    let h0 = spec.h0().matrix();
    let a = spec.a().matrix();
    let a2 = a * a;
    let commutator = h0 * r - r * h0;
    let dissipator = a * r * a - (&a2 * r + r * &a2) * Complex64::new(0.5, 0.0);
    commutator * Complex64::new(0.0, -spec.omega()) + dissipator * Complex64::new(rate, 0.0)
}

/// RK4 integration of [`lindblad_rhs`] from `t = 0`, returning `ρ(t)` at
/// each of the non-decreasing `checkpoints`. Each interval between
/// checkpoints is split into uniform steps no longer than `dt`.
pub fn integrate_lindblad(
    rho0: &DensityMatrix,
    spec: &HamiltonianSpec,
    rate: f64,
    checkpoints: &[f64],
    dt: f64,
) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: rho0.dim(),
        });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if checkpoints.iter().any(|t| !(*t >= 0.0)) || checkpoints.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "checkpoints must be non-negative and non-decreasing".into(),
        ));
    }
    let f = |r: &DMatrix<Complex64>| generator(r, spec, rate);
    let mut rho = rho0.matrix().clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &target in checkpoints {
        if target > t {
            let (n, h) = step_grid(target - t, dt);
            let half = Complex64::new(0.5 * h, 0.0);
            let full = Complex64::new(h, 0.0);
            let sixth = Complex64::new(h / 6.0, 0.0);
            for _ in 0..n {
                let k1 = f(&rho);
                let k2 = f(&(&rho + &k1 * half));
                let k3 = f(&(&rho + &k2 * half));
                let k4 = f(&(&rho + &k3 * full));
                rho += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * sixth;
            }
            t = target;
        }
        out.push(DensityMatrix::from_matrix_unchecked(rho.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};
    use crate::quantum::{Operator, StateVector};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_states_are_stationary_under_pure_collapse() {
        let rho = DensityMatrix::new(DMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)])).unwrap();
        let d = lindblad_rhs(&rho, &HamiltonianSpec::pure_collapse(0.0), 4.0).unwrap();
        assert!(d.norm() < 1e-15);
    }

    #[test]
    fn coherence_decays_at_twice_the_rate() {
        let rho = StateVector::plus().to_density();
        let d = lindblad_rhs(&rho, &HamiltonianSpec::pure_collapse(0.0), 1.0).unwrap();
        assert!((d[(0, 1)] - rho.entry(0, 1) * -2.0).norm() < 1e-15);
        assert!(d[(0, 0)].norm() < 1e-15 && d[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn zero_rate_is_the_von_neumann_equation() {
        let spec = HamiltonianSpec::sigma_x_sigma_z(1.3, 0.0);
        let rho = StateVector::from_angle(0.2).to_density();
        let d = lindblad_rhs(&rho, &spec, 0.0).unwrap();
        let h = spec.h0().matrix();
        let expected = (h * rho.matrix() - rho.matrix() * h) * c(0.0, -1.3);
        assert!((d - expected).norm() < 1e-15);
    }

    #[test]
    fn integrated_coherence_matches_exponential() {
        let rho0 = StateVector::plus().to_density();
        let out = integrate_lindblad(&rho0, &HamiltonianSpec::pure_collapse(0.0), 1.0, &[0.0, 0.25, 0.5], 1e-3).unwrap();
        for (state, t) in out.iter().zip([0.0, 0.25, 0.5f64]) {
            assert!((state.entry(0, 1).re - 0.5 * (-2.0 * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_checkpoints() {
        let rho0 = StateVector::plus().to_density();
        let spec = HamiltonianSpec::pure_collapse(0.0);
        assert!(integrate_lindblad(&rho0, &spec, 1.0, &[0.5, 0.1], 1e-3).is_err());
    }

    proptest! {
        #[test]
        fn trace_free_and_hermitian(
            r in 0.0..1.0f64, theta in 0.0..PI, phi in 0.0..TAU,
            omega in -2.0..2.0f64, rate in 0.0..5.0f64,
            h in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        ) {
            let v = crate::quantum::BlochVector::new(r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()).unwrap();
            let rho = crate::quantum::bloch_to_density(&v).unwrap();
            let h0 = Operator::from_rows(&[vec![c(h.0, 0.0), c(h.1, h.2)], vec![c(h.1, -h.2), c(-h.0, 0.0)]]).unwrap();
            let spec = HamiltonianSpec::new(omega, h0, Operator::pauli_z(), 0.0).unwrap();
            let d = lindblad_rhs(&rho, &spec, rate).unwrap();
            prop_assert!(d.trace().norm() < 1e-12);
            prop_assert!((d.adjoint() - &d).norm() < 1e-12);
        }
    }
}
