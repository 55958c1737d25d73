use crate::quantum::{Operator, StateVector, DEGENERACY_TOLERANCE};
use crate::{Error, Result};

/// Born weights `(|⟨a₀|ψ⟩|², |⟨a₁|ψ⟩|²)` on the eigenvectors of `A`, larger
/// eigenvalue first.
pub fn born_probabilities(initial: &StateVector, a: &Operator) -> Result<(f64, f64)> {
    if a.dim() != 2 {
        return Err(Error::NotTwoLevel(a.dim()));
    }
    initial.require_dim(2)?;
    let (values, basis) = a.eigh();
    let gap = values[0] - values[1];
    if gap <= DEGENERACY_TOLERANCE {
        return Err(Error::DegenerateCollapseOperator {
            gap,
            tolerance: DEGENERACY_TOLERANCE,
        });
    }
    let amplitudes = basis.adjoint() * initial.amplitudes();
    let p0 = amplitudes[0].norm_sqr();
    let p1 = amplitudes[1].norm_sqr();
    let total = p0 + p1;
    Ok((p0 / total, p1 / total))
}
