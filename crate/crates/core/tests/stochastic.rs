//! Statistical properties of the CSL integrators. Seeds are fixed, so every
//! assertion is reproducible; thresholds are set at three or more standard
//! errors.

use collapse_sim::analysis::{compare_to_lindblad, run_ensemble, EnsembleConfig};
use collapse_sim::quantum::{Complex64, HamiltonianSpec, Operator, StateVector};
use collapse_sim::stochastic::{
    ito_csl_step, simulate_ensemble, simulate_stochastic, simulate_stochastic_path, stratonovich_step, NoiseConfig,
    Scheme,
};

fn endpoint_coherences(seed: u64, n: usize) -> Vec<Complex64> {
    let spec = HamiltonianSpec::pure_collapse(0.0);
    let noise = NoiseConfig::new(1.0, seed, Scheme::Ito, 2e-3);
    simulate_ensemble(&StateVector::plus(), &spec, &noise, 0.5, n, 1000)
        .unwrap()
        .iter()
        .map(|t| {
            let psi = t.states.last().unwrap();
            psi.amplitude(0) * psi.amplitude(1).conj()
        })
        .collect()
}

#[test]
fn lindblad_deviation_shrinks_as_inverse_sqrt_n() {
    let exact = 0.5 * (-1.0_f64).exp();
    let samples = endpoint_coherences(71, 48_000);
    let rms = |batch: usize| {
        let chunks: Vec<f64> = samples
            .chunks_exact(batch)
            .map(|c| {
                let mean = c.iter().sum::<Complex64>() / batch as f64;
                (mean.norm() - exact).powi(2)
            })
            .collect();
        (chunks.iter().sum::<f64>() / chunks.len() as f64).sqrt()
    };
    let ratio = rms(200) / rms(800);
    assert!((1.4..=2.8).contains(&ratio), "ratio {ratio}, expected about 2");
}

#[test]
fn lindblad_comparison_reports_checkpoints() {
    let spec = HamiltonianSpec::pure_collapse(0.0);
    let noise = NoiseConfig::new(1.0, 72, Scheme::Stratonovich, 1e-3);
    let ensemble = simulate_ensemble(&StateVector::plus(), &spec, &noise, 1.0, 2000, 250).unwrap();
    let comparison = compare_to_lindblad(&ensemble, &spec, 1.0).unwrap();
    assert_eq!(comparison.checkpoints.len(), 5);
    for c in &comparison.checkpoints {
        let expected = 0.5 * (-2.0 * c.t).exp();
        assert!((c.reference_coherence() - expected).abs() < 1e-9, "t = {}", c.t);
        assert!(c.frobenius_deviation <= 4.0 * c.standard_error + 1e-12, "t = {}", c.t);
    }
    let too_few = &ensemble[..50];
    assert!(compare_to_lindblad(too_few, &spec, 1.0).is_err());
}

#[test]
fn lindblad_with_precession() {
    let spec = HamiltonianSpec::sigma_x_sigma_z(2.0, 0.0);
    let noise = NoiseConfig::new(0.5, 73, Scheme::Ito, 1e-3);
    let ensemble = simulate_ensemble(&StateVector::from_angle(0.3), &spec, &noise, 1.0, 3000, 500).unwrap();
    let comparison = compare_to_lindblad(&ensemble, &spec, 0.5).unwrap();
    for c in &comparison.checkpoints {
        assert!(c.frobenius_deviation <= 4.0 * c.standard_error + 1e-12, "t = {}", c.t);
    }
}

#[test]
fn schemes_give_the_same_born_statistics() {
    let spec = HamiltonianSpec::pure_collapse(0.0);
    let initial = StateVector::from_angle(0.9);
    let p0 = 0.9_f64.cos().powi(2);
    for (scheme, seed) in [(Scheme::Ito, 81), (Scheme::Stratonovich, 82)] {
        let noise = NoiseConfig::new(10.0, seed, scheme, 1e-3);
        let stats = run_ensemble(&initial, &spec, &noise, &EnsembleConfig::new(3000, 1.5)).unwrap();
        let sigma = (p0 * (1.0 - p0) / 3000.0).sqrt();
        let fraction = stats.count_to_0 as f64 / 3000.0;
        assert!((fraction - p0).abs() <= 3.5 * sigma, "{scheme:?}: {fraction} vs {p0}");
        assert!((stats.born_p0 - p0).abs() < 1e-12);
        assert!(stats.uncollapsed_fraction() < 0.01);
    }
}

#[test]
fn born_rule_in_a_rotated_basis() {
    let spec = HamiltonianSpec::new(0.0, Operator::zero(2), Operator::pauli_x(), 0.0).unwrap();
    let noise = NoiseConfig::new(8.0, 83, Scheme::Ito, 1e-3);
    let initial = StateVector::from_angle(0.2);
    let p0 = (0.2_f64.cos() + 0.2_f64.sin()).powi(2) / 2.0;
    let stats = run_ensemble(&initial, &spec, &noise, &EnsembleConfig::new(3000, 2.0)).unwrap();
    let sigma = (p0 * (1.0 - p0) / 3000.0).sqrt();
    assert!((stats.born_p0 - p0).abs() < 1e-12);
    assert!((stats.count_to_0 as f64 / 3000.0 - p0).abs() <= 3.5 * sigma);
}

#[test]
fn martingale_for_both_schemes() {
    let spec = HamiltonianSpec::pure_collapse(0.0);
    let initial = StateVector::from_angle(1.1);
    let z0 = (2.2_f64).cos();
    for (scheme, seed) in [(Scheme::Ito, 84), (Scheme::Stratonovich, 85)] {
        let noise = NoiseConfig::new(4.0, seed, scheme, 1e-3);
        let config = EnsembleConfig::new(3000, 1.0).with_checkpoints(vec![0.05, 0.2, 0.6, 1.0]);
        let stats = run_ensemble(&initial, &spec, &noise, &config).unwrap();
        for m in &stats.z_moments {
            assert!((m.mean - z0).abs() <= 3.5 * m.std_error, "{scheme:?} t = {}: {} vs {z0}", m.t, m.mean);
        }
        let spread: Vec<f64> = stats.z_moments.iter().map(|m| m.variance).collect();
        assert!(spread.windows(2).all(|w| w[1] > w[0]), "variance should grow: {spread:?}");
    }
}

#[test]
fn eigenstates_are_absorbing() {
    let spec = HamiltonianSpec::pure_collapse(0.0);
    for (ket, z) in [(StateVector::ket0(), 1.0), (StateVector::ket1(), -1.0)] {
        for scheme in [Scheme::Ito, Scheme::Stratonovich] {
            let traj = simulate_stochastic(&ket, &spec, &NoiseConfig::new(20.0, 86, scheme, 1e-3), 1.0).unwrap();
            assert!(traj.bloch.iter().all(|b| (b.z() - z).abs() < 1e-14));
        }
    }
}

#[test]
fn single_steps_preserve_the_norm() {
    let spec = HamiltonianSpec::sigma_x_sigma_z(1.0, 0.0);
    let psi = StateVector::from_bloch_angles(1.0, 0.4);
    for dw in [-0.1, 0.0, 0.03, 0.2] {
        for step in [ito_csl_step, stratonovich_step] {
            let (next, err) = step(&psi, &spec, 3.0, dw, 1e-3).unwrap();
            assert!((next.norm_sqr() - 1.0).abs() < 1e-14);
            assert!(err.is_finite());
        }
    }
}

#[test]
fn reproducible_and_scheduling_independent() {
    let spec = HamiltonianSpec::sigma_x_sigma_z(1.0, 0.0);
    let noise = NoiseConfig::new(2.0, 87, Scheme::Ito, 1e-3);
    let initial = StateVector::plus();
    let ensemble = simulate_ensemble(&initial, &spec, &noise, 0.3, 16, 10).unwrap();
    for (i, traj) in ensemble.iter().enumerate() {
        let alone = simulate_stochastic_path(&initial, &spec, &noise, 0.3, i as u64, 10).unwrap();
        assert_eq!(traj, &alone);
    }
    assert_ne!(ensemble[0].wiener_path, ensemble[1].wiener_path);
    let again = simulate_ensemble(&initial, &spec, &noise, 0.3, 16, 10).unwrap();
    assert_eq!(ensemble, again);
}

#[test]
fn ensemble_statistics_are_deterministic() {
    let spec = HamiltonianSpec::pure_collapse(0.0);
    let noise = NoiseConfig::new(10.0, 88, Scheme::Ito, 1e-3);
    let config = EnsembleConfig::new(200, 1.0).with_checkpoints(vec![0.5]);
    let a = run_ensemble(&StateVector::plus(), &spec, &noise, &config).unwrap();
    let b = run_ensemble(&StateVector::plus(), &spec, &noise, &config).unwrap();
    assert_eq!(a, b);
    let c = run_ensemble(&StateVector::plus(), &spec, &noise.with_seed(89), &config).unwrap();
    assert_ne!(a.outcomes, c.outcomes);
}
