/// Which rate to use in the strong-coupling closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrongCouplingRate {
    /// `γ(λ₀ - λ₁)`, the rate obtained by dropping the `ω` terms from the
    /// Bloch equations: `ż = -γΔλ(z² - 1)`.
    #[default]
    FromBlochEquations,
    /// `γ(λ₀ - λ₁)/ω`, the exponent of the published closed form. Agrees with
    /// [`StrongCouplingRate::FromBlochEquations`] only at `ω = 1`.
    LiteralClosedForm,
}

/// `z(t) = (1 - e^{-2u}) / (1 + e^{-2u}) = tanh(u)`, `u = γ(λ₀ - λ₁)t`.
///
/// Solution of the strong-coupling equation starting on the equator.
pub fn analytic_z_strong_coupling(t: f64, gamma: f64, omega: f64, lambda0: f64, lambda1: f64) -> f64 {
    analytic_z_strong_coupling_with(t, gamma, omega, lambda0, lambda1, StrongCouplingRate::default())
}

pub fn analytic_z_strong_coupling_with(
    t: f64,
    gamma: f64,
    omega: f64,
    lambda0: f64,
    lambda1: f64,
    rate: StrongCouplingRate,
) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let mut u = gamma * (lambda0 - lambda1) * t;
    if rate == StrongCouplingRate::LiteralClosedForm {
        u /= omega;
    }
    u.tanh()
}
