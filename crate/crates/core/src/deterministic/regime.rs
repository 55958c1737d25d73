use num_complex::Complex64;

use crate::quantum::HamiltonianSpec;
use crate::{Error, Result};

/// Qualitative behaviour of the two-level flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Real spectrum: superpositions persist and the state precesses.
    Oscillatory,
    /// Coalescing eigenvalues.
    Exceptional,
    /// An eigenvalue with positive imaginary part dominates at late times.
    Collapsing,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Oscillatory => "oscillatory",
            Regime::Exceptional => "exceptional",
            Regime::Collapsing => "collapsing",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Eigenvalues of `ωH₀ + iγA`, the larger imaginary part first.
    pub eigenvalues: [Complex64; 2],
}

const REAL_TOLERANCE: f64 = 1e-10;
const COALESCENCE_TOLERANCE: f64 = 1e-12;

/// Classifies the spectrum of `K = ωH₀ + iγA`.
///
/// Normalisation removes any component of the flow proportional to the
/// identity, so the classification uses the traceless part `K - Tr(K)/2`,
/// whose eigenvalues are `±μ`.
pub fn classify_regime(spec: &HamiltonianSpec) -> Result<RegimeReport> {
    if spec.dim() != 2 {
        return Err(Error::NotTwoLevel(spec.dim()));
    }
    let k = spec.h0().matrix() * Complex64::new(spec.omega(), 0.0)
        + spec.a().matrix() * Complex64::new(0.0, spec.gamma());
    let shift = (k[(0, 0)] + k[(1, 1)]) * 0.5;
    let half_split = (k[(0, 0)] - k[(1, 1)]) * 0.5;
    let mu_sqr = half_split * half_split + k[(0, 1)] * k[(1, 0)];
    let mu = mu_sqr.sqrt();

    let (first, second) = if mu.im >= 0.0 { (shift + mu, shift - mu) } else { (shift - mu, shift + mu) };
    let scale = k.norm().max(1.0);
    let regime = if mu_sqr.norm() <= COALESCENCE_TOLERANCE * scale * scale {
        Regime::Exceptional
    } else if mu.im.abs() <= REAL_TOLERANCE {
        Regime::Oscillatory
    } else {
        Regime::Collapsing
    };
    Ok(RegimeReport {
        regime,
        eigenvalues: [first, second],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::Operator;

    #[test]
    fn sigma_x_plus_i_gamma_sigma_z() {
        let r = classify_regime(&HamiltonianSpec::sigma_x_sigma_z(1.0, 0.5)).unwrap();
        assert_eq!(r.regime, Regime::Oscillatory);
        let root = 0.75f64.sqrt();
        let mut re: Vec<f64> = r.eigenvalues.iter().map(|e| e.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + root).abs() < 1e-12 && (re[1] - root).abs() < 1e-12);
        assert!(r.eigenvalues.iter().all(|e| e.im.abs() < 1e-12));

        let r = classify_regime(&HamiltonianSpec::sigma_x_sigma_z(1.0, 1.0)).unwrap();
        assert_eq!(r.regime, Regime::Exceptional);
        assert!(r.eigenvalues.iter().all(|e| e.norm() < 1e-12));

        let r = classify_regime(&HamiltonianSpec::sigma_x_sigma_z(1.0, 2.0)).unwrap();
        assert_eq!(r.regime, Regime::Collapsing);
        assert!((r.eigenvalues[0] - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        assert!((r.eigenvalues[1] - Complex64::new(0.0, -(3f64.sqrt()))).norm() < 1e-12);
    }

    #[test]
    fn unitary_and_pure_collapse_limits() {
        assert_eq!(
            classify_regime(&HamiltonianSpec::sigma_x_sigma_z(1.0, 0.0)).unwrap().regime,
            Regime::Oscillatory
        );
        assert_eq!(
            classify_regime(&HamiltonianSpec::pure_collapse(1.0)).unwrap().regime,
            Regime::Collapsing
        );
    }

    #[test]
    fn trace_of_a_does_not_change_the_class() {
        let shifted = HamiltonianSpec::new(1.0, Operator::pauli_x(), Operator::diagonal(&[3.0, 1.0]), 0.5).unwrap();
        assert_eq!(classify_regime(&shifted).unwrap().regime, Regime::Oscillatory);
    }
}
