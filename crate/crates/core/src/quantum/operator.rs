use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{HERMITIAN_TOLERANCE, I, ONE, ZERO};
use crate::{Error, Result};

/// A Hermitian `n x n` operator, `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<Complex64>,
}

/// Largest `|m_ij - conj(m_ji)|` over all entries.
pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl Operator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::named("operator", matrix)
    }

    /// Validates `matrix` and reports failures under `name` (e.g. `"H0"`).
    pub fn named(name: &str, matrix: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::DimensionTooSmall(rows));
        }
        if matrix.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(format!("{name} has non-finite entries")));
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian {
                name: name.to_string(),
                deviation,
            });
        }
        Ok(Self { matrix })
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn pauli_x() -> Self {
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        }
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0])
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            matrix: DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(values[i], 0.0)
                } else {
                    ZERO
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(&self.matrix * v)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().0
    }

    /// Smallest gap between adjacent eigenvalues.
    pub fn min_eigen_gap(&self) -> f64 {
        self.eigenvalues()
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min)
    }

    /// Eigen-decomposition with eigenvalues in descending order.
    ///
    /// Column `k` of the returned unitary is the eigenvector of the `k`-th
    /// eigenvalue, phased so that its first non-negligible component is real
    /// and positive. Diagonal inputs yield an exact permutation matrix.
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let n = self.dim();
        let is_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == ZERO));
        let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if is_diagonal {
            (
                (0..n).map(|i| self.matrix[(i, i)].re).collect(),
                DMatrix::identity(n, n),
            )
        } else {
            let eig = self.matrix.clone().symmetric_eigen();
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        };

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

        let mut basis = DMatrix::zeros(n, n);
        for (k, &src) in order.iter().enumerate() {
            let mut col = vectors.column(src).into_owned();
            if let Some(lead) = col.iter().copied().find(|c| c.norm() > 1e-12) {
                let phase = lead.conj() / lead.norm();
                col *= phase;
            }
            basis.set_column(k, &col);
        }
        (order.iter().map(|&k| values[k]).collect(), basis)
    }
}
