//! One function per subcommand. Each writes its files and returns a short
//! human-readable report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{gamma_sweep, run_ensemble, EnsembleConfig, EnsembleStats, SweepRow};
use crate::deterministic::{
    classify_regime, detect_collapse, integrate_deterministic, IntegratorConfig, DEFAULT_COLLAPSE_EPSILON,
};
use crate::quantum::{HamiltonianSpec, Operator, StateVector};
use crate::stochastic::{simulate_stochastic_path, RNG_DESCRIPTION};

use super::config::{Mode, NoiseSection, Overrides, ScenarioConfig, DEFAULT_OUTPUT_DIR};
use super::output::{
    moment_rows, outcome_rows, stats_pairs, stochastic_columns, stochastic_rows, summary_rows, trajectory_rows,
    write_csv, Metadata, MOMENT_COLUMNS, OUTCOME_COLUMNS, STATS_COLUMNS, SUMMARY_COLUMNS, TRAJECTORY_COLUMNS,
};
use super::CliError;

/// Couplings of the reference figure.
pub const FIGURE1_GAMMAS: [f64; 4] = [0.5, 1.0, 2.0, 100.0];
pub const FIGURE1_OMEGA: f64 = 1.0;
pub const FIGURE1_T_END: f64 = 8.0;
/// Target spacing between recorded samples.
pub const FIGURE1_SAMPLE_INTERVAL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub text: String,
}

fn base_metadata(mode: Mode) -> Metadata {
    let mut m = Metadata::new();
    m.push("program", concat!("collapse-sim ", env!("CARGO_PKG_VERSION")))
        .push("mode", mode);
    m
}

fn push_hamiltonian(m: &mut Metadata, spec: &HamiltonianSpec, h0: &str, a: &str) {
    m.push("hbar", 1)
        .push("omega", spec.omega())
        .push("gamma", spec.gamma())
        .push("h0", h0)
        .push("a", a)
        .push("basis", "amplitudes and Bloch coordinates in the eigenbasis of A, larger eigenvalue first");
}

fn push_noise(m: &mut Metadata, n: &NoiseSection) {
    m.push("seed", n.noise.seed)
        .push("rng", RNG_DESCRIPTION)
        .push("scheme", n.noise.scheme.as_str())
        .push("rate", n.noise.rate)
        .push("dt", n.noise.dt)
        .push("t_end", n.t_end);
}

fn labels(cfg: &ScenarioConfig) -> (&str, &str) {
    let h = cfg.hamiltonian.as_ref().expect("checked by check_mode");
    (&h.h0_label, &h.a_label)
}

fn file_path(cfg: &ScenarioConfig, mode: Mode, suffix: &str) -> PathBuf {
    cfg.output
        .dir
        .join(format!("{}{suffix}.csv", cfg.output.prefix_or(mode.as_str())))
}

pub fn run_deterministic(cfg: &ScenarioConfig) -> Result<RunReport, CliError> {
    cfg.check_mode(Mode::Deterministic)?;
    let spec = cfg.spec();
    let integrator = cfg.integrator.as_ref().expect("checked by check_mode");
    let (n_steps, dt) = integrator.grid(spec);
    let traj = integrate_deterministic(&cfg.initial.state, spec, integrator)?;
    let collapse = detect_collapse(&traj, cfg.collapse_epsilon);
    let regime = classify_regime(spec)?;

    let (h0, a) = labels(cfg);
    let mut meta = base_metadata(Mode::Deterministic);
    push_hamiltonian(&mut meta, spec, h0, a);
    meta.push("initial", &cfg.initial.label)
        .push("seed", "none")
        .push("dt", dt)
        .push("steps", n_steps)
        .push("t_end", integrator.t_end)
        .push("record_stride", integrator.record_stride)
        .push("norm_drift_tolerance", integrator.norm_drift_tolerance)
        .push("collapse_epsilon", cfg.collapse_epsilon)
        .push("regime", regime.regime);
    let path = file_path(cfg, Mode::Deterministic, "");
    write_csv(&path, &meta, &TRAJECTORY_COLUMNS, &trajectory_rows(&traj, spec)?)?;

    let last = traj.last_bloch().expect("trajectory has an initial sample");
    let mut text = String::new();
    let _ = writeln!(text, "regime: {}", regime.regime);
    let _ = writeln!(text, "final bloch: ({}, {}, {})", last.x(), last.y(), last.z());
    let _ = writeln!(text, "{}", describe_collapse(&collapse));
    let _ = writeln!(text, "max norm drift: {:e}", traj.max_norm_drift());
    let _ = writeln!(text, "wrote {}", path.display());
    Ok(RunReport { files: vec![path], text })
}

fn describe_collapse(c: &crate::deterministic::CollapseReport) -> String {
    match (c.target_index, c.collapse_time) {
        (Some(k), Some(t)) => format!("collapse: to eigenstate {k} at t = {t}"),
        _ => "collapse: none".to_string(),
    }
}

pub fn run_stochastic(cfg: &ScenarioConfig) -> Result<RunReport, CliError> {
    cfg.check_mode(Mode::Stochastic)?;
    let spec = cfg.spec();
    let n = cfg.noise.as_ref().expect("checked by check_mode");
    let traj = simulate_stochastic_path(&cfg.initial.state, spec, &n.noise, n.t_end, 0, n.record_stride)?;
    let collapse = detect_collapse(&traj, cfg.collapse_epsilon);

    let (h0, a) = labels(cfg);
    let mut meta = base_metadata(Mode::Stochastic);
    push_hamiltonian(&mut meta, spec, h0, a);
    meta.push("initial", &cfg.initial.label);
    push_noise(&mut meta, n);
    meta.push("stream", 0)
        .push("record_stride", n.record_stride)
        .push("collapse_epsilon", cfg.collapse_epsilon);
    let path = file_path(cfg, Mode::Stochastic, "");
    write_csv(&path, &meta, &stochastic_columns(), &stochastic_rows(&traj, spec)?)?;

    let mut text = String::new();
    let _ = writeln!(text, "{}", describe_collapse(&collapse));
    let _ = writeln!(text, "final z: {}", traj.bloch.last().expect("initial sample").z());
    let _ = writeln!(text, "wrote {}", path.display());
    Ok(RunReport { files: vec![path], text })
}

/// Human-readable summary of an ensemble.
pub fn stats_block(stats: &EnsembleStats) -> String {
    let mut text = String::from("ensemble statistics\n");
    for (k, v) in stats_pairs(stats) {
        let v = if v.is_empty() { "undefined".to_string() } else { v };
        let _ = writeln!(text, "  {k:<22} {v}");
    }
    let _ = writeln!(
        text,
        "  {:<22} {}",
        "within_3_sigma",
        if stats.within_born_sigmas(3.0) { "yes" } else { "no" }
    );
    text
}

pub fn run_ensemble_mode(cfg: &ScenarioConfig) -> Result<RunReport, CliError> {
    cfg.check_mode(Mode::Ensemble)?;
    let spec = cfg.spec();
    let n = cfg.noise.as_ref().expect("checked by check_mode");
    let ens = EnsembleConfig::new(n.trajectories, n.t_end)
        .with_checkpoints(n.checkpoints.clone())
        .with_collapse_epsilon(cfg.collapse_epsilon);
    let stats = run_ensemble(&cfg.initial.state, spec, &n.noise, &ens)?;

    let (h0, a) = labels(cfg);
    let mut meta = base_metadata(Mode::Ensemble);
    push_hamiltonian(&mut meta, spec, h0, a);
    meta.push("initial", &cfg.initial.label);
    push_noise(&mut meta, n);
    meta.push("trajectories", n.trajectories)
        .push("collapse_epsilon", cfg.collapse_epsilon);

    let outcomes = file_path(cfg, Mode::Ensemble, "_outcomes");
    let stats_path = file_path(cfg, Mode::Ensemble, "_stats");
    let moments = file_path(cfg, Mode::Ensemble, "_moments");
    write_csv(&outcomes, &meta, &OUTCOME_COLUMNS, &outcome_rows(&stats))?;
    let pairs = stats_pairs(&stats)
        .into_iter()
        .map(|(k, v)| vec![k.to_string(), v])
        .collect::<Vec<_>>();
    write_csv(&stats_path, &meta, &STATS_COLUMNS, &pairs)?;
    write_csv(&moments, &meta, &MOMENT_COLUMNS, &moment_rows(&stats))?;

    let mut text = stats_block(&stats);
    for p in [&outcomes, &stats_path, &moments] {
        let _ = writeln!(text, "wrote {}", p.display());
    }
    Ok(RunReport {
        files: vec![outcomes, stats_path, moments],
        text,
    })
}

fn gamma_file_name(prefix: &str, gamma: f64) -> String {
    format!("{prefix}_gamma_{gamma}.csv")
}

#[allow(clippy::too_many_arguments)]
fn write_sweep(
    rows: &[SweepRow],
    configs: &[IntegratorConfig],
    dir: &Path,
    prefix: &str,
    meta: &Metadata,
    h0: &Operator,
    a: &Operator,
    omega: f64,
) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::with_capacity(rows.len() + 1);
    for (row, config) in rows.iter().zip(configs) {
        let spec = HamiltonianSpec::new(omega, h0.clone(), a.clone(), row.gamma)?;
        let mut m = meta.clone();
        m.0.retain(|(k, _)| k != "gamma" && k != "dt" && k != "record_stride");
        let (steps, dt) = config.grid(&spec);
        m.push("gamma", row.gamma)
            .push("regime", row.regime.regime)
            .push("dt", dt)
            .push("steps", steps)
            .push("record_stride", config.record_stride);
        let path = dir.join(gamma_file_name(prefix, row.gamma));
        write_csv(&path, &m, &TRAJECTORY_COLUMNS, &trajectory_rows(&row.trajectory, &spec)?)?;
        files.push(path);
    }
    let summary = dir.join(format!("{prefix}_summary.csv"));
    write_csv(&summary, meta, &SUMMARY_COLUMNS, &summary_rows(rows))?;
    files.push(summary);
    Ok(files)
}

fn sweep_text(rows: &[SweepRow], files: &[PathBuf]) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "{:>10}  {:<12} {:<9} target  collapse_time", "gamma", "regime", "collapsed");
    for r in rows {
        let _ = writeln!(
            text,
            "{:>10}  {:<12} {:<9} {:<7} {}",
            r.gamma,
            r.regime.regime.as_str(),
            if r.collapse.collapsed { "yes" } else { "no" },
            r.collapse.target_index.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
            r.collapse.collapse_time.map(|t| t.to_string()).unwrap_or_else(|| "-".into()),
        );
    }
    for f in files {
        let _ = writeln!(text, "wrote {}", f.display());
    }
    text
}

pub fn run_sweep(cfg: &ScenarioConfig) -> Result<RunReport, CliError> {
    cfg.check_mode(Mode::Sweep)?;
    let spec = cfg.spec();
    let integrator = cfg.integrator.as_ref().expect("checked by check_mode");
    let gammas = cfg.sweep_gammas.as_ref().expect("checked by check_mode");
    let rows = gamma_sweep(
        &cfg.initial.state,
        spec.h0(),
        spec.a(),
        spec.omega(),
        gammas,
        integrator,
        cfg.collapse_epsilon,
    )?;

    let (h0, a) = labels(cfg);
    let mut meta = base_metadata(Mode::Sweep);
    push_hamiltonian(&mut meta, spec, h0, a);
    meta.0.retain(|(k, _)| k != "gamma");
    meta.push("gammas", format!("{gammas:?}"))
        .push("initial", &cfg.initial.label)
        .push("seed", "none")
        .push("dt", integrator.dt.map_or("default per gamma".to_string(), |d| d.to_string()))
        .push("t_end", integrator.t_end)
        .push("record_stride", integrator.record_stride)
        .push("collapse_epsilon", cfg.collapse_epsilon);
    let configs = vec![integrator.clone(); rows.len()];
    let files = write_sweep(
        &rows,
        &configs,
        &cfg.output.dir,
        cfg.output.prefix_or("sweep"),
        &meta,
        spec.h0(),
        spec.a(),
        spec.omega(),
    )?;
    Ok(RunReport {
        text: sweep_text(&rows, &files),
        files,
    })
}

/// Reference figure: `H₀ = σx`, `A = σz`, `ω = 1`, initial `|+⟩`, one
/// trajectory per coupling in [`FIGURE1_GAMMAS`] and a summary table. Only
/// `out_dir`, `dt` and `t_end` of `overrides` are used.
pub fn run_figure1(overrides: &Overrides) -> Result<RunReport, CliError> {
    let dir = overrides.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let t_end = overrides.t_end.unwrap_or(FIGURE1_T_END);
    let (h0, a) = (Operator::pauli_x(), Operator::pauli_z());
    let initial = StateVector::plus();
    let mut rows = Vec::with_capacity(FIGURE1_GAMMAS.len());
    let mut configs = Vec::with_capacity(FIGURE1_GAMMAS.len());
    for gamma in FIGURE1_GAMMAS {
        let spec = HamiltonianSpec::new(FIGURE1_OMEGA, h0.clone(), a.clone(), gamma)?;
        let dt = overrides.dt.unwrap_or_else(|| spec.default_dt());
        let stride = ((FIGURE1_SAMPLE_INTERVAL / dt).round() as usize).max(1);
        let config = IntegratorConfig::new(t_end).with_dt(dt).with_record_stride(stride);
        if let Err(e) = config.validate() {
            return Err(CliError::Config(super::ConfigError {
                errors: vec![format!("figure1: {e}")],
            }));
        }
        rows.extend(gamma_sweep(&initial, &h0, &a, FIGURE1_OMEGA, &[gamma], &config, DEFAULT_COLLAPSE_EPSILON)?);
        configs.push(config);
    }

    let mut meta = base_metadata(Mode::Figure1);
    meta.push("hbar", 1)
        .push("omega", FIGURE1_OMEGA)
        .push("h0", "sigma_x")
        .push("a", "sigma_z")
        .push(
            "basis",
            "amplitudes and Bloch coordinates in the eigenbasis of A, larger eigenvalue first",
        )
        .push("gammas", format!("{FIGURE1_GAMMAS:?}"))
        .push("initial", "plus")
        .push("seed", "none")
        .push("dt", overrides.dt.map_or("default per gamma".to_string(), |d| d.to_string()))
        .push("t_end", t_end)
        .push("sample_interval", FIGURE1_SAMPLE_INTERVAL)
        .push("collapse_epsilon", DEFAULT_COLLAPSE_EPSILON);
    let files = write_sweep(&rows, &configs, &dir, "figure1", &meta, &h0, &a, FIGURE1_OMEGA)?;
    Ok(RunReport {
        text: sweep_text(&rows, &files),
        files,
    })
}
