use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{hermitian_deviation, StateVector, HERMITIAN_TOLERANCE, NORM_TOLERANCE};
use crate::{Error, Result};

/// Real Bloch vector `(x, y, z)` of a two-level density matrix
/// `ρ = ½ [[1 + z, x - iy], [x + iy, 1 - z]]`.
///
/// Basis index 0 maps to the north pole `z = +1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite("Bloch vector".into()));
        }
        let v = Self { x, y, z };
        if v.norm() > 1.0 + NORM_TOLERANCE {
            return Err(Error::OutsideBlochBall(v.norm()));
        }
        Ok(v)
    }

    /// Integrator output that has not been checked against the unit ball.
    pub(crate) fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn north() -> Self {
        Self::new_unchecked(0.0, 0.0, 1.0)
    }

    pub fn south() -> Self {
        Self::new_unchecked(0.0, 0.0, -1.0)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let [a, b, c] = self.as_array();
        let [d, e, f] = other.as_array();
        ((a - d).powi(2) + (b - e).powi(2) + (c - f).powi(2)).sqrt()
    }
}

/// An `n x n` density matrix: Hermitian with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::DimensionTooSmall(rows));
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian {
                name: "density matrix".into(),
                deviation,
            });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::BadTrace(trace));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    /// `½ I`, the maximally mixed two-level state.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn to_bloch(&self) -> Result<BlochVector> {
        density_to_bloch(self)
    }
}

/// Bloch vector of a two-level pure state: `x = 2 Re(c₀ c̄₁)`,
/// `y = -2 Im(c₀ c̄₁)`, `z = |c₀|² - |c₁|²`.
pub fn state_to_bloch(psi: &StateVector) -> Result<BlochVector> {
    if psi.dim() != 2 {
        return Err(Error::NotTwoLevel(psi.dim()));
    }
    let (c0, c1) = (psi.amplitude(0), psi.amplitude(1));
    let coherence = c0 * c1.conj();
    Ok(BlochVector::new_unchecked(
        2.0 * coherence.re,
        -2.0 * coherence.im,
        c0.norm_sqr() - c1.norm_sqr(),
    ))
}

pub fn bloch_to_density(v: &BlochVector) -> Result<DensityMatrix> {
    if v.norm() > 1.0 + NORM_TOLERANCE {
        return Err(Error::OutsideBlochBall(v.norm()));
    }
    let half = 0.5;
    Ok(DensityMatrix::from_matrix_unchecked(DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(half * (1.0 + v.z), 0.0),
            Complex64::new(half * v.x, -half * v.y),
            Complex64::new(half * v.x, half * v.y),
            Complex64::new(half * (1.0 - v.z), 0.0),
        ],
    )))
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::NotTwoLevel(rho.dim()));
    }
    let m = rho.matrix();
    let coherence = m[(1, 0)];
    BlochVector::new(
        2.0 * coherence.re,
        2.0 * coherence.im,
        (m[(0, 0)] - m[(1, 1)]).re,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) {
        assert!((a - b).norm() < tol, "{a} vs {b}");
    }

    #[test]
    fn state_to_bloch_examples() {
        assert_eq!(state_to_bloch(&StateVector::ket0()).unwrap().as_array(), [0.0, 0.0, 1.0]);

        let plus = state_to_bloch(&StateVector::plus()).unwrap();
        assert!(plus.distance(&BlochVector::new(1.0, 0.0, 0.0).unwrap()) < 1e-15);

        let plus_i = StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        let v = state_to_bloch(&plus_i).unwrap();
        assert!(v.distance(&BlochVector::new(0.0, 1.0, 0.0).unwrap()) < 1e-15);
    }

    #[test]
    fn state_to_bloch_requires_two_levels() {
        let s = StateVector::basis(3, 1).unwrap();
        assert_eq!(state_to_bloch(&s).unwrap_err(), Error::NotTwoLevel(3));
    }

    #[test]
    fn bloch_to_density_examples() {
        let half = Complex64::new(0.5, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);

        let mixed = bloch_to_density(&BlochVector::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_close(mixed.matrix(), DensityMatrix::maximally_mixed(2).matrix(), 1e-15);

        let north = bloch_to_density(&BlochVector::north()).unwrap();
        assert_close(north.matrix(), &DMatrix::from_row_slice(2, 2, &[one, zero, zero, zero]), 1e-15);

        let plus = bloch_to_density(&BlochVector::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert_close(plus.matrix(), &DMatrix::from_row_slice(2, 2, &[half, half, half, half]), 1e-15);
    }

    #[test]
    fn outside_ball_rejected() {
        assert!(matches!(BlochVector::new(1.0, 0.5, 0.0), Err(Error::OutsideBlochBall(_))));
        let outside = BlochVector::new_unchecked(0.0, 0.0, 1.1);
        assert!(matches!(bloch_to_density(&outside), Err(Error::OutsideBlochBall(_))));
    }

    #[test]
    fn density_validation() {
        let bad_trace = DMatrix::identity(2, 2);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::BadTrace(_))));
        let non_hermitian = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(0.1, 0.0),
                Complex64::new(0.2, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        assert!(matches!(DensityMatrix::new(non_hermitian), Err(Error::NotHermitian { .. })));
    }

    proptest! {
        #[test]
        fn bloch_density_round_trip(theta in 0.0..std::f64::consts::PI, phi in 0.0..6.3f64, r in 0.0..1.0f64) {
            let v = BlochVector::new(
                r * theta.sin() * phi.cos(),
                r * theta.sin() * phi.sin(),
                r * theta.cos(),
            ).unwrap();
            let rho = bloch_to_density(&v).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
            let back = density_to_bloch(&rho).unwrap();
            prop_assert!(back.distance(&v) < 1e-12);
        }

        #[test]
        fn pure_states_lie_on_the_sphere(theta in 0.0..std::f64::consts::PI, phi in 0.0..6.3f64) {
            let psi = StateVector::from_bloch_angles(theta, phi);
            let v = state_to_bloch(&psi).unwrap();
            prop_assert!((v.norm() - 1.0).abs() < 1e-8);
            let rho = psi.to_density();
            prop_assert!((rho.purity() - 1.0).abs() < 1e-8);
            let expected = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            for (a, b) in v.as_array().iter().zip(expected) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
