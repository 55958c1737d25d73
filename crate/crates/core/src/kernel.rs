//! Fixed-size two-level arithmetic shared by the integrators.
//!
//! States are propagated in the eigenbasis of `A`, where `A = diag(λ₀, λ₁)`.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;

use crate::quantum::{to_eigenbasis_of_a, BlochVector, HamiltonianSpec, StateVector};
use crate::Result;

pub(crate) type Qubit = Vector2<Complex64>;
pub(crate) type Mat2 = Matrix2<Complex64>;

#[derive(Debug, Clone)]
pub(crate) struct EigenFrame {
    /// Columns are the eigenvectors of `A`.
    pub basis: Mat2,
    /// `-iω H₀` expressed in the eigenbasis.
    pub generator: Mat2,
    pub lambda: [f64; 2],
}

fn to_fixed(m: &DMatrix<Complex64>) -> Mat2 {
    Mat2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

impl EigenFrame {
    pub fn new(spec: &HamiltonianSpec) -> Result<Self> {
        let (params, basis) = to_eigenbasis_of_a(spec)?;
        let h0 = to_fixed(&params.h0_matrix());
        Ok(Self {
            basis: to_fixed(&basis),
            generator: h0 * Complex64::new(0.0, -spec.omega()),
            lambda: [params.lambda0, params.lambda1],
        })
    }

    pub fn to_eigen(&self, psi: &StateVector) -> Qubit {
        let v = Qubit::new(psi.amplitude(0), psi.amplitude(1));
        self.basis.adjoint() * v
    }

    pub fn from_eigen(&self, q: &Qubit) -> StateVector {
        let v = self.basis * q;
        StateVector::from_normalized(nalgebra::DVector::from_column_slice(v.as_slice()))
    }

    /// Rayleigh quotient `⟨q|A|q⟩ / ⟨q|q⟩`.
    #[inline]
    pub fn exp_a(&self, q: &Qubit) -> f64 {
        let p0 = q[0].norm_sqr();
        let p1 = q[1].norm_sqr();
        (self.lambda[0] * p0 + self.lambda[1] * p1) / (p0 + p1)
    }

    /// `(A - ⟨A⟩) q`.
    #[inline]
    pub fn centred_a(&self, q: &Qubit) -> Qubit {
        let mean = self.exp_a(q);
        Qubit::new(q[0] * (self.lambda[0] - mean), q[1] * (self.lambda[1] - mean))
    }
}

#[inline]
pub(crate) fn z_of(q: &Qubit) -> f64 {
    let p0 = q[0].norm_sqr();
    let p1 = q[1].norm_sqr();
    (p0 - p1) / (p0 + p1)
}

pub(crate) fn bloch_of(q: &Qubit) -> BlochVector {
    let coherence = q[0] * q[1].conj();
    BlochVector::new_unchecked(
        2.0 * coherence.re,
        -2.0 * coherence.im,
        q[0].norm_sqr() - q[1].norm_sqr(),
    )
}

#[inline]
pub(crate) fn is_finite(q: &Qubit) -> bool {
    q.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Number of fixed steps covering `[0, t_end]` with step at most `dt`, and
/// the resulting uniform step.
pub(crate) fn step_grid(t_end: f64, dt: f64) -> (usize, f64) {
    let n = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    (n, t_end / n as f64)
}
