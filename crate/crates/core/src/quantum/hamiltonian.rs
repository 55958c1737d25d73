use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Operator, DEGENERACY_TOLERANCE};
use crate::{Error, Result};

/// Parameters of `H = ħωH₀ + iγA` with `ħ = 1`.
///
/// Construction guarantees matching dimensions, finite scalars and a
/// collapse operator `A` whose eigenvalues are pairwise separated by more
/// than [`DEGENERACY_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    omega: f64,
    h0: Operator,
    a: Operator,
    gamma: f64,
}

impl HamiltonianSpec {
    pub fn new(omega: f64, h0: Operator, a: Operator, gamma: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::NonFinite("omega".into()));
        }
        if !gamma.is_finite() {
            return Err(Error::NonFinite("gamma".into()));
        }
        if h0.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: h0.dim(),
                found: a.dim(),
            });
        }
        let gap = a.min_eigen_gap();
        if gap <= DEGENERACY_TOLERANCE {
            return Err(Error::DegenerateCollapseOperator {
                gap,
                tolerance: DEGENERACY_TOLERANCE,
            });
        }
        Ok(Self { omega, h0, a, gamma })
    }

    /// `H₀ = σx`, `A = σz`: the two-level model used for the reference runs.
    pub fn sigma_x_sigma_z(omega: f64, gamma: f64) -> Self {
        Self {
            omega,
            h0: Operator::pauli_x(),
            a: Operator::pauli_z(),
            gamma,
        }
    }

    /// Pure collapse dynamics: `H₀ = 0`, `A = σz`.
    pub fn pure_collapse(gamma: f64) -> Self {
        Self {
            omega: 0.0,
            h0: Operator::zero(2),
            a: Operator::pauli_z(),
            gamma,
        }
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self {
            gamma,
            ..self.clone()
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn h0(&self) -> &Operator {
        &self.h0
    }

    pub fn a(&self) -> &Operator {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    /// `λ_max - λ_min` of `A`.
    pub fn spectral_width(&self) -> f64 {
        let ev = self.a.eigenvalues();
        ev[0] - ev[ev.len() - 1]
    }

    /// `0.01 / max(ω, |γ|(λ₀ - λ₁))`, or 0.01 when both scales vanish.
    pub fn default_dt(&self) -> f64 {
        let scale = self.omega.abs().max(self.gamma.abs() * self.spectral_width());
        if scale > 0.0 {
            0.01 / scale
        } else {
            0.01
        }
    }
}

/// Entries of `H₀` and the spectrum of `A` in the eigenbasis of `A`:
/// `H₀ = [[a0, b0r + i b0i], [b0r - i b0i, d0]]`, `A = diag(λ₀, λ₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    pub a0: f64,
    pub b0r: f64,
    pub b0i: f64,
    pub d0: f64,
    pub lambda0: f64,
    pub lambda1: f64,
}

impl TwoLevelParams {
    pub fn new(a0: f64, b0r: f64, b0i: f64, d0: f64, lambda0: f64, lambda1: f64) -> Result<Self> {
        if lambda0 - lambda1 <= DEGENERACY_TOLERANCE {
            return Err(Error::DegenerateCollapseOperator {
                gap: lambda0 - lambda1,
                tolerance: DEGENERACY_TOLERANCE,
            });
        }
        Ok(Self {
            a0,
            b0r,
            b0i,
            d0,
            lambda0,
            lambda1,
        })
    }

    pub fn delta_lambda(&self) -> f64 {
        self.lambda0 - self.lambda1
    }

    /// `⟨A⟩` of the pure state at Bloch height `z`.
    pub fn expectation_a(&self, z: f64) -> f64 {
        0.5 * (self.lambda0 + self.lambda1) + 0.5 * self.delta_lambda() * z
    }

    pub fn h0_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(self.a0, 0.0),
                Complex64::new(self.b0r, self.b0i),
                Complex64::new(self.b0r, -self.b0i),
                Complex64::new(self.d0, 0.0),
            ],
        )
    }
}

/// Rewrites a two-level spec in the eigenbasis of `A`.
///
/// Returns the parameters and the unitary `U` whose columns are the
/// eigenvectors of `A` for `λ₀ > λ₁`; amplitudes transform as `ψ' = U†ψ`.
pub fn to_eigenbasis_of_a(spec: &HamiltonianSpec) -> Result<(TwoLevelParams, DMatrix<Complex64>)> {
    if spec.dim() != 2 {
        return Err(Error::NotTwoLevel(spec.dim()));
    }
    let (values, basis) = spec.a().eigh();
    let h0 = basis.adjoint() * spec.h0().matrix() * &basis;
    let params = TwoLevelParams::new(
        h0[(0, 0)].re,
        h0[(0, 1)].re,
        h0[(0, 1)].im,
        h0[(1, 1)].re,
        values[0],
        values[1],
    )?;
    Ok((params, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sigma_x_in_sigma_z_basis() {
        let spec = HamiltonianSpec::new(1.0, Operator::pauli_x(), Operator::pauli_z(), 1.0).unwrap();
        let (p, u) = to_eigenbasis_of_a(&spec).unwrap();
        assert_eq!(p, TwoLevelParams::new(0.0, 1.0, 0.0, 0.0, 1.0, -1.0).unwrap());
        assert_eq!(u, DMatrix::identity(2, 2));
    }

    #[test]
    fn sigma_z_in_sigma_x_basis() {
        let spec = HamiltonianSpec::new(1.0, Operator::pauli_z(), Operator::pauli_x(), 1.0).unwrap();
        let (p, u) = to_eigenbasis_of_a(&spec).unwrap();
        assert!(p.a0.abs() < 1e-12 && p.d0.abs() < 1e-12 && p.b0i.abs() < 1e-12);
        assert!((p.b0r - 1.0).abs() < 1e-12);
        assert!((p.lambda0 - 1.0).abs() < 1e-12 && (p.lambda1 + 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ],
        );
        assert!((u - hadamard).norm() < 1e-12);
    }

    #[test]
    fn identity_collapse_operator_is_degenerate() {
        let err = HamiltonianSpec::new(1.0, Operator::pauli_x(), Operator::identity(2), 1.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateCollapseOperator { .. }));
        assert!(err.to_string().contains("degenerate collapse operator"));
    }

    #[test]
    fn near_degenerate_rejected_but_resolvable_gap_accepted() {
        let near = Operator::diagonal(&[1.0, 1.0 + 5e-10]);
        assert!(HamiltonianSpec::new(1.0, Operator::pauli_x(), near, 1.0).is_err());
        let ok = Operator::diagonal(&[1.0, 1.0 + 1e-8]);
        assert!(HamiltonianSpec::new(1.0, Operator::pauli_x(), ok, 1.0).is_ok());
    }

    #[test]
    fn mismatched_dimensions() {
        let err = HamiltonianSpec::new(1.0, Operator::zero(3), Operator::pauli_z(), 1.0).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn three_level_validation_only() {
        let spec = HamiltonianSpec::new(1.0, Operator::zero(3), Operator::diagonal(&[1.0, 0.0, -1.0]), 1.0).unwrap();
        assert_eq!(to_eigenbasis_of_a(&spec).unwrap_err(), Error::NotTwoLevel(3));
        let degenerate = Operator::diagonal(&[1.0, 0.0, 1.0]);
        assert!(HamiltonianSpec::new(1.0, Operator::zero(3), degenerate, 1.0).is_err());
    }

    #[test]
    fn default_dt_follows_fastest_scale() {
        assert!((HamiltonianSpec::sigma_x_sigma_z(1.0, 100.0).default_dt() - 5e-5).abs() < 1e-18);
        assert!((HamiltonianSpec::sigma_x_sigma_z(1.0, 0.1).default_dt() - 0.01).abs() < 1e-18);
    }

    fn hermitian(a: f64, d: f64, re: f64, im: f64) -> Operator {
        Operator::from_rows(&[
            vec![Complex64::new(a, 0.0), Complex64::new(re, im)],
            vec![Complex64::new(re, -im), Complex64::new(d, 0.0)],
        ])
        .unwrap()
    }

    proptest! {
        #[test]
        fn eigenbasis_preserves_spectra(
            h in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
            a in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
        ) {
            let h0 = hermitian(h.0, h.1, h.2, h.3);
            let a_op = hermitian(a.0, a.1, a.2, a.3);
            prop_assume!(a_op.min_eigen_gap() > 1e-3);
            let spec = HamiltonianSpec::new(1.0, h0.clone(), a_op.clone(), 1.0).unwrap();
            let (p, u) = to_eigenbasis_of_a(&spec).unwrap();

            let unitarity = (u.adjoint() * &u - DMatrix::<Complex64>::identity(2, 2)).norm();
            prop_assert!(unitarity < 1e-12);

            let transformed = Operator::new(p.h0_matrix()).unwrap();
            for (x, y) in transformed.eigenvalues().iter().zip(h0.eigenvalues()) {
                prop_assert!((x - y).abs() < 1e-10);
            }
            let diag = u.adjoint() * a_op.matrix() * &u;
            prop_assert!((diag[(0, 0)].re - p.lambda0).abs() < 1e-10);
            prop_assert!(diag[(0, 1)].norm() < 1e-10);
            prop_assert!(p.lambda0 > p.lambda1);
        }
    }
}
