//! Scenario files.
//!
//! A scenario is a TOML document. Every section is walked by hand so that
//! all problems are collected in one pass, type errors name the offending
//! key, and unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use toml::{Table, Value};

use crate::deterministic::{IntegratorConfig, DEFAULT_COLLAPSE_EPSILON, DEFAULT_NORM_DRIFT_TOLERANCE};
use crate::quantum::{to_eigenbasis_of_a, Complex64, HamiltonianSpec, Operator, StateVector};
use crate::stochastic::{NoiseConfig, Scheme};

pub const DEFAULT_OMEGA: f64 = 1.0;
pub const DEFAULT_NOISE_DT: f64 = 1e-3;
pub const DEFAULT_TRAJECTORIES: usize = 1000;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

/// Tolerance on `‖v‖ = 1` for an initial state given as a Bloch vector.
const BLOCH_INPUT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Deterministic,
    Stochastic,
    Ensemble,
    Sweep,
    Figure1,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Deterministic => "deterministic",
            Mode::Stochastic => "stochastic",
            Mode::Ensemble => "ensemble",
            Mode::Sweep => "sweep",
            Mode::Figure1 => "figure1",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deterministic" => Ok(Mode::Deterministic),
            "stochastic" => Ok(Mode::Stochastic),
            "ensemble" => Ok(Mode::Ensemble),
            "sweep" => Ok(Mode::Sweep),
            "figure1" => Ok(Mode::Figure1),
            other => Err(format!(
                "unknown mode \"{other}\" (expected deterministic, stochastic, ensemble, sweep or figure1)"
            )),
        }
    }
}

/// Every problem found in a scenario, in document order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub errors: Vec<String>,
}

impl ConfigError {
    fn single(message: impl Into<String>) -> Self {
        Self {
            errors: vec![message.into()],
        }
    }

    /// True if any message contains `needle`.
    pub fn mentions(&self, needle: &str) -> bool {
        self.errors.iter().any(|e| e.contains(needle))
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.errors.len();
        writeln!(f, "invalid configuration ({n} error{}):", if n == 1 { "" } else { "s" })?;
        for e in &self.errors {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianConfig {
    /// Validated with `gamma = 0` when the key is absent.
    pub spec: HamiltonianSpec,
    pub gamma_given: bool,
    pub h0_label: String,
    pub a_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfig {
    /// Amplitudes in the basis of the operator matrices.
    pub state: StateVector,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSection {
    pub noise: NoiseConfig,
    pub t_end: f64,
    pub trajectories: usize,
    pub record_stride: usize,
    pub checkpoints: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub prefix: Option<String>,
}

impl OutputConfig {
    pub fn prefix_or<'a>(&'a self, fallback: &'a str) -> &'a str {
        self.prefix.as_deref().unwrap_or(fallback)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Option<Mode>,
    pub hamiltonian: Option<HamiltonianConfig>,
    pub initial: InitialConfig,
    pub integrator: Option<IntegratorConfig>,
    pub noise: Option<NoiseSection>,
    pub sweep_gammas: Option<Vec<f64>>,
    pub collapse_epsilon: f64,
    pub output: OutputConfig,
}

impl ScenarioConfig {
    /// Checks that every section `mode` needs is present and usable.
    pub fn check_mode(&self, mode: Mode) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        if mode == Mode::Figure1 {
            return Ok(());
        }
        match &self.hamiltonian {
            None => errors.push("[hamiltonian]: section is required".to_string()),
            Some(h) => {
                if h.spec.dim() != 2 {
                    errors.push(format!(
                        "hamiltonian: {mode} runs need a two-level system, got dimension {}",
                        h.spec.dim()
                    ));
                }
                if mode == Mode::Deterministic && !h.gamma_given {
                    errors.push("hamiltonian.gamma: required for deterministic runs".to_string());
                }
            }
        }
        match mode {
            Mode::Deterministic | Mode::Sweep => {
                if self.integrator.is_none() {
                    errors.push("[integrator]: section with t_end is required".to_string());
                }
            }
            Mode::Stochastic | Mode::Ensemble => {
                if self.noise.is_none() {
                    errors.push("[noise]: section with rate and t_end is required".to_string());
                }
            }
            Mode::Figure1 => {}
        }
        if mode == Mode::Sweep && self.sweep_gammas.is_none() {
            errors.push("[sweep]: section with gammas is required".to_string());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { errors })
        }
    }

    /// Hamiltonian with the configured coupling; only valid after
    /// [`check_mode`](Self::check_mode) succeeded.
    pub fn spec(&self) -> &HamiltonianSpec {
        &self.hamiltonian.as_ref().expect("checked by check_mode").spec
    }
}

/// Command-line values that replace the corresponding scenario keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

impl Overrides {
    fn is_empty(&self) -> bool {
        self.seed.is_none() && self.out_dir.is_none() && self.dt.is_none() && self.t_end.is_none()
    }
}

/// Parses and validates a scenario without overrides.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    parse_config_with(text, &Overrides::default(), None)
}

/// Parses a scenario, applies `overrides` and validates the result. When a
/// mode is known (from `target` or the file's `mode` key), the sections it
/// requires are checked as well; `target` wins over the file.
pub fn parse_config_with(text: &str, overrides: &Overrides, target: Option<Mode>) -> Result<ScenarioConfig, ConfigError> {
    let mut root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::single(format!("malformed syntax: {}", e.to_string().trim_end())))?;

    let mut errors = Vec::new();
    let file_mode = match root.get("mode") {
        None => None,
        Some(Value::String(s)) => match s.parse::<Mode>() {
            Ok(m) => Some(m),
            Err(e) => {
                errors.push(format!("mode: {e}"));
                None
            }
        },
        Some(other) => {
            errors.push(type_error("mode", "a string", other));
            None
        }
    };
    let mode = target.or(file_mode);
    if !overrides.is_empty() {
        apply_overrides(&mut root, overrides, mode);
    }

    let config = walk(&root, mode, &mut errors);
    if let (Some(config), true) = (&config, errors.is_empty()) {
        if let Some(m) = mode {
            config.check_mode(m)?;
        }
    }
    match config {
        Some(c) if errors.is_empty() => Ok(c),
        _ => Err(ConfigError { errors }),
    }
}

/// Reads and parses a scenario file.
pub fn load_config(path: &Path, overrides: &Overrides, target: Option<Mode>) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::single(format!("cannot read {}: {e}", path.display())))?;
    parse_config_with(&text, overrides, target)
}

fn apply_overrides(root: &mut Table, o: &Overrides, mode: Option<Mode>) {
    let has_noise = root.contains_key("noise");
    let mut set = |section: &str, key: &str, value: Value| {
        let entry = root.entry(section.to_string()).or_insert_with(|| Value::Table(Table::new()));
        if let Value::Table(t) = entry {
            t.insert(key.to_string(), value);
        }
    };
    let timing = match mode {
        Some(Mode::Stochastic | Mode::Ensemble) => "noise",
        _ => "integrator",
    };
    if let Some(dt) = o.dt {
        set(timing, "dt", Value::Float(dt));
    }
    if let Some(t_end) = o.t_end {
        set(timing, "t_end", Value::Float(t_end));
    }
    let noise_used = timing == "noise" || has_noise;
    if let Some(seed) = o.seed.filter(|_| noise_used) {
        set("noise", "seed", Value::Integer(seed as i64));
    }
    if let Some(dir) = &o.out_dir {
        set("output", "dir", Value::String(dir.to_string_lossy().into_owned()));
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "string",
        Value::Integer(_) => "integer",
        Value::Float(_) => "float",
        Value::Boolean(_) => "boolean",
        Value::Datetime(_) => "datetime",
        Value::Array(_) => "array",
        Value::Table(_) => "table",
    }
}

fn type_error(path: &str, expected: &str, found: &Value) -> String {
    format!("{path}: expected {expected}, found {} {found}", type_name(found))
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

/// Typed access to one table, recording errors under dotted paths.
struct Section<'a> {
    table: &'a Table,
    prefix: String,
}

impl<'a> Section<'a> {
    fn new(table: &'a Table, prefix: &str) -> Self {
        Self {
            table,
            prefix: prefix.to_string(),
        }
    }

    fn path(&self, key: &str) -> String {
        join(&self.prefix, key)
    }

    fn reject_unknown(&self, allowed: &[&str], errors: &mut Vec<String>) {
        for key in self.table.keys() {
            if !allowed.contains(&key.as_str()) {
                errors.push(format!("{}: unknown key", self.path(key)));
            }
        }
    }

    fn number(&self, key: &str, errors: &mut Vec<String>) -> Option<f64> {
        let v = self.table.get(key)?;
        match as_number(v) {
            Some(x) if x.is_finite() => Some(x),
            Some(_) => {
                errors.push(format!("{}: must be finite", self.path(key)));
                None
            }
            None => {
                errors.push(type_error(&self.path(key), "a number", v));
                None
            }
        }
    }

    fn positive(&self, key: &str, errors: &mut Vec<String>) -> Option<f64> {
        let x = self.number(key, errors)?;
        if x > 0.0 {
            Some(x)
        } else {
            errors.push(format!("{}: must be positive, got {x}", self.path(key)));
            None
        }
    }

    fn count(&self, key: &str, min: u64, errors: &mut Vec<String>) -> Option<u64> {
        let v = self.table.get(key)?;
        match v {
            Value::Integer(i) if *i >= min as i64 => Some(*i as u64),
            Value::Integer(i) => {
                errors.push(format!("{}: must be at least {min}, got {i}", self.path(key)));
                None
            }
            other => {
                errors.push(type_error(&self.path(key), "an integer", other));
                None
            }
        }
    }

    fn string(&self, key: &str, errors: &mut Vec<String>) -> Option<&'a str> {
        match self.table.get(key)? {
            Value::String(s) => Some(s),
            other => {
                errors.push(type_error(&self.path(key), "a string", other));
                None
            }
        }
    }

    fn numbers(&self, key: &str, errors: &mut Vec<String>) -> Option<Vec<f64>> {
        let v = self.table.get(key)?;
        let Value::Array(items) = v else {
            errors.push(type_error(&self.path(key), "an array of numbers", v));
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            match as_number(item) {
                Some(x) if x.is_finite() => out.push(x),
                _ => {
                    errors.push(type_error(&format!("{}[{i}]", self.path(key)), "a finite number", item));
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    fn subsection(&self, key: &str, errors: &mut Vec<String>) -> Option<Section<'a>> {
        match self.table.get(key)? {
            Value::Table(t) => Some(Section::new(t, &self.path(key))),
            other => {
                errors.push(type_error(&self.path(key), "a table", other));
                None
            }
        }
    }

    fn required<T>(&self, key: &str, value: Option<T>, errors: &mut Vec<String>) -> Option<T> {
        if value.is_none() && !self.table.contains_key(key) {
            errors.push(format!("{}: missing required key", self.path(key)));
        }
        value
    }
}

fn as_number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn as_complex(v: &Value) -> Option<Complex64> {
    if let Some(x) = as_number(v) {
        return Some(Complex64::new(x, 0.0));
    }
    match v {
        Value::Array(pair) if pair.len() == 2 => Some(Complex64::new(as_number(&pair[0])?, as_number(&pair[1])?)),
        _ => None,
    }
}

fn complex_list(items: &[Value], path: &str, errors: &mut Vec<String>) -> Option<Vec<Complex64>> {
    let mut out = Vec::with_capacity(items.len());
    let mut ok = true;
    for (i, item) in items.iter().enumerate() {
        match as_complex(item) {
            Some(c) => out.push(c),
            None => {
                errors.push(type_error(&format!("{path}[{i}]"), "a number or [re, im] pair", item));
                ok = false;
            }
        }
    }
    ok.then_some(out)
}

/// Named operator or explicit matrix (rows of numbers or `[re, im]` pairs).
fn parse_operator(value: &Value, path: &str, dim_hint: usize, errors: &mut Vec<String>) -> Option<(Operator, String)> {
    match value {
        Value::String(name) => {
            let op = match name.as_str() {
                "sigma_x" => Operator::pauli_x(),
                "sigma_y" => Operator::pauli_y(),
                "sigma_z" => Operator::pauli_z(),
                "identity" => Operator::identity(dim_hint),
                "zero" => Operator::zero(dim_hint),
                other => {
                    errors.push(format!(
                        "{path}: unknown operator \"{other}\" (expected sigma_x, sigma_y, sigma_z, identity, zero or a matrix)"
                    ));
                    return None;
                }
            };
            Some((op, name.clone()))
        }
        Value::Array(rows) => {
            let n = rows.len();
            let mut entries = Vec::with_capacity(n * n);
            let mut ok = true;
            for (r, row) in rows.iter().enumerate() {
                let row_path = format!("{path}[{r}]");
                let Value::Array(items) = row else {
                    errors.push(type_error(&row_path, "an array (matrix row)", row));
                    ok = false;
                    continue;
                };
                if items.len() != n {
                    errors.push(format!("{path}: matrix is not square (row {r} has {} entries, expected {n})", items.len()));
                    ok = false;
                    continue;
                }
                match complex_list(items, &row_path, errors) {
                    Some(c) => entries.extend(c),
                    None => ok = false,
                }
            }
            if !ok {
                return None;
            }
            match Operator::named(path, DMatrix::from_row_slice(n, n, &entries)) {
                Ok(op) => Some((op, format!("{value}"))),
                Err(e) => {
                    errors.push(format!("{path}: {e}"));
                    None
                }
            }
        }
        other => {
            errors.push(type_error(path, "an operator name or a matrix", other));
            None
        }
    }
}

fn walk(root: &Table, mode: Option<Mode>, errors: &mut Vec<String>) -> Option<ScenarioConfig> {
    let top = Section::new(root, "");
    top.reject_unknown(
        &["mode", "collapse_epsilon", "hamiltonian", "initial", "integrator", "noise", "sweep", "output"],
        errors,
    );

    let collapse_epsilon = match top.positive("collapse_epsilon", errors) {
        Some(e) if e >= 1.0 => {
            errors.push(format!("collapse_epsilon: must be below 1, got {e}"));
            DEFAULT_COLLAPSE_EPSILON
        }
        Some(e) => e,
        None => DEFAULT_COLLAPSE_EPSILON,
    };

    let hamiltonian = top.subsection("hamiltonian", errors).and_then(|s| parse_hamiltonian(&s, errors));
    let initial = parse_initial(top.subsection("initial", errors), hamiltonian.as_ref(), errors);
    let integrator = top.subsection("integrator", errors).and_then(|s| parse_integrator(&s, errors));
    let noise = top.subsection("noise", errors).and_then(|s| parse_noise(&s, mode, errors));
    let sweep_gammas = top.subsection("sweep", errors).and_then(|s| {
        s.reject_unknown(&["gammas"], errors);
        let gammas = s.required("gammas", s.numbers("gammas", errors), errors)?;
        if gammas.is_empty() {
            errors.push("sweep.gammas: must not be empty".to_string());
            return None;
        }
        Some(gammas)
    });
    let output = match top.subsection("output", errors) {
        Some(s) => {
            s.reject_unknown(&["dir", "prefix"], errors);
            let dir = s.string("dir", errors).unwrap_or(DEFAULT_OUTPUT_DIR);
            let prefix = s.string("prefix", errors).map(str::to_string);
            if let Some(p) = &prefix {
                if p.is_empty() || p.contains(['/', '\\']) {
                    errors.push(format!("output.prefix: must be a non-empty file name stem, got \"{p}\""));
                }
            }
            OutputConfig {
                dir: PathBuf::from(dir),
                prefix,
            }
        }
        None => OutputConfig {
            dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            prefix: None,
        },
    };

    Some(ScenarioConfig {
        mode,
        hamiltonian,
        initial: initial?,
        integrator,
        noise,
        sweep_gammas,
        collapse_epsilon,
        output,
    })
}

fn parse_hamiltonian(s: &Section, errors: &mut Vec<String>) -> Option<HamiltonianConfig> {
    s.reject_unknown(&["omega", "gamma", "h0", "a"], errors);
    let omega = s.number("omega", errors).unwrap_or(DEFAULT_OMEGA);
    let gamma = s.number("gamma", errors);
    let gamma_given = s.table.contains_key("gamma");

    let explicit_dim = |key: &str| match s.table.get(key) {
        Some(Value::Array(rows)) => Some(rows.len()),
        _ => None,
    };
    let dim = explicit_dim("h0").or_else(|| explicit_dim("a")).unwrap_or(2).max(2);
    let mut operator = |key: &str| match s.table.get(key) {
        Some(v) => parse_operator(v, &s.path(key), dim, errors),
        None => {
            errors.push(format!("{}: missing required key", s.path(key)));
            None
        }
    };
    let h0 = operator("h0");
    let a = operator("a");
    let ((h0, h0_label), (a, a_label)) = (h0?, a?);
    if gamma_given && gamma.is_none() {
        return None;
    }
    match HamiltonianSpec::new(omega, h0, a, gamma.unwrap_or(0.0)) {
        Ok(spec) => Some(HamiltonianConfig {
            spec,
            gamma_given,
            h0_label,
            a_label,
        }),
        Err(e) => {
            let field = match e {
                crate::Error::DegenerateCollapseOperator { .. } => s.path("a"),
                _ => s.prefix.clone(),
            };
            errors.push(format!("{field}: {e}"));
            None
        }
    }
}

fn named_state(name: &str) -> Option<StateVector> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Some(match name {
        "ket0" => StateVector::ket0(),
        "ket1" => StateVector::ket1(),
        "plus" => StateVector::plus(),
        "minus" => StateVector::minus(),
        "plus_i" => StateVector::new(vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)]).ok()?,
        "minus_i" => StateVector::new(vec![Complex64::new(r, 0.0), Complex64::new(0.0, -r)]).ok()?,
        _ => return None,
    })
}

/// Default initial state is `|+⟩`.
fn parse_initial(s: Option<Section>, hamiltonian: Option<&HamiltonianConfig>, errors: &mut Vec<String>) -> Option<InitialConfig> {
    let Some(s) = s else {
        return Some(InitialConfig {
            state: StateVector::plus(),
            label: "plus".into(),
        });
    };
    let forms = ["state", "amplitudes", "bloch", "angle"];
    s.reject_unknown(&forms, errors);
    let given: Vec<&str> = forms.iter().copied().filter(|k| s.table.contains_key(*k)).collect();
    if given.len() != 1 {
        errors.push(format!(
            "{}: exactly one of state, amplitudes, bloch or angle is required, found {}",
            s.prefix,
            if given.is_empty() { "none".to_string() } else { given.join(", ") }
        ));
        return None;
    }
    let result = match given[0] {
        "state" => {
            let name = s.string("state", errors)?;
            match named_state(name) {
                Some(state) => Ok(InitialConfig {
                    state,
                    label: name.to_string(),
                }),
                None => Err(format!(
                        "{}: unknown state \"{name}\" (expected ket0, ket1, plus, minus, plus_i or minus_i)",
                    s.path("state")
                )),
            }
        }
        "amplitudes" => {
            let v = &s.table["amplitudes"];
            let Value::Array(items) = v else {
                errors.push(type_error(&s.path("amplitudes"), "an array", v));
                return None;
            };
            let amps = complex_list(items, &s.path("amplitudes"), errors)?;
            StateVector::new(amps)
                .map(|state| InitialConfig {
                    state,
                    label: format!("amplitudes {v}"),
                })
                .map_err(|e| format!("{}: {e}", s.path("amplitudes")))
        }
        "bloch" => {
            let v = s.numbers("bloch", errors)?;
            bloch_state(&v, hamiltonian)
                .map(|state| InitialConfig {
                    state,
                    label: format!("bloch [{}, {}, {}]", v[0], v[1], v[2]),
                })
                .map_err(|e| format!("{}: {e}", s.path("bloch")))
        }
        _ => {
            let theta = s.number("angle", errors)?;
            Ok(InitialConfig {
                state: StateVector::from_angle(theta),
                label: format!("angle {theta}"),
            })
        }
    };
    match result {
        Ok(initial) => {
            if let Some(h) = hamiltonian {
                if initial.state.dim() != h.spec.dim() {
                    errors.push(format!(
                        "{}: state has dimension {}, operators have dimension {}",
                        s.prefix,
                        initial.state.dim(),
                        h.spec.dim()
                    ));
                    return None;
                }
            }
            Some(initial)
        }
        Err(e) => {
            errors.push(e);
            None
        }
    }
}

/// Pure state with Bloch vector `v` in the eigenbasis of `A`.
fn bloch_state(v: &[f64], hamiltonian: Option<&HamiltonianConfig>) -> Result<StateVector, String> {
    if v.len() != 3 {
        return Err(format!("expected three components, got {}", v.len()));
    }
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if (norm - 1.0).abs() > BLOCH_INPUT_TOLERANCE {
        return Err(format!("a pure initial state needs a unit vector, got length {norm}"));
    }
    let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
    let phi = v[1].atan2(v[0]);
    let eigen = StateVector::from_bloch_angles(theta, phi);
    let Some(h) = hamiltonian else {
        return Ok(eigen);
    };
    if h.spec.dim() != 2 {
        return Err("a Bloch vector describes a two-level state".to_string());
    }
    let (_, basis) = to_eigenbasis_of_a(&h.spec).map_err(|e| e.to_string())?;
    StateVector::new((basis * eigen.amplitudes()).iter().copied().collect()).map_err(|e| e.to_string())
}

fn parse_integrator(s: &Section, errors: &mut Vec<String>) -> Option<IntegratorConfig> {
    s.reject_unknown(&["t_end", "dt", "record_stride", "norm_drift_tolerance"], errors);
    let t_end = s.required("t_end", s.positive("t_end", errors), errors);
    let dt = s.positive("dt", errors);
    let stride = s.count("record_stride", 1, errors).unwrap_or(1) as usize;
    let tolerance = s
        .positive("norm_drift_tolerance", errors)
        .unwrap_or(DEFAULT_NORM_DRIFT_TOLERANCE);
    let mut config = IntegratorConfig::new(t_end?)
        .with_record_stride(stride)
        .with_norm_drift_tolerance(tolerance);
    config.dt = dt;
    Some(config)
}

fn parse_noise(s: &Section, mode: Option<Mode>, errors: &mut Vec<String>) -> Option<NoiseSection> {
    s.reject_unknown(
        &["rate", "seed", "scheme", "dt", "t_end", "trajectories", "record_stride", "checkpoints"],
        errors,
    );
    let rate = s.required("rate", s.number("rate", errors), errors);
    if let Some(r) = rate {
        if r < 0.0 {
            errors.push(format!("{}: must be non-negative, got {r}", s.path("rate")));
        }
    }
    let seed = s.count("seed", 0, errors).unwrap_or(0);
    let scheme = match s.string("scheme", errors) {
        None => Some(Scheme::Ito),
        Some(name) => match name.parse::<Scheme>() {
            Ok(scheme) => Some(scheme),
            Err(_) => {
                errors.push(format!(
                    "{}: unknown scheme \"{name}\" (expected ito or stratonovich)",
                    s.path("scheme")
                ));
                None
            }
        },
    };
    let dt = s.positive("dt", errors).unwrap_or(DEFAULT_NOISE_DT);
    let t_end = s.required("t_end", s.positive("t_end", errors), errors);
    let trajectories = s.count("trajectories", 1, errors).unwrap_or(DEFAULT_TRAJECTORIES as u64) as usize;
    let record_stride = s.count("record_stride", 1, errors).unwrap_or(1) as usize;
    let checkpoints = s.numbers("checkpoints", errors).unwrap_or_default();
    if let Some(t_end) = t_end {
        for (i, &c) in checkpoints.iter().enumerate() {
            if !(0.0..=t_end).contains(&c) {
                errors.push(format!("{}[{i}]: {c} lies outside [0, t_end = {t_end}]", s.path("checkpoints")));
            }
        }
        if dt > t_end && mode != Some(Mode::Figure1) {
            errors.push(format!("{}: {dt} exceeds t_end = {t_end}", s.path("dt")));
        }
    }
    Some(NoiseSection {
        noise: NoiseConfig::new(rate?.max(0.0), seed, scheme?, dt),
        t_end: t_end?,
        trajectories,
        record_stride,
        checkpoints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[hamiltonian]
h0 = "sigma_x"
a = "sigma_z"
gamma = 100

[integrator]
t_end = 0.05
"#;

    #[test]
    fn minimal_deterministic_config_gets_defaults() {
        let c = parse_config_with(MINIMAL, &Overrides::default(), Some(Mode::Deterministic)).unwrap();
        let h = c.hamiltonian.as_ref().unwrap();
        assert_eq!(h.spec.omega(), DEFAULT_OMEGA);
        assert_eq!(h.spec.gamma(), 100.0);
        assert_eq!(c.initial.state, StateVector::plus());
        let i = c.integrator.unwrap();
        assert_eq!(i.t_end, 0.05);
        assert_eq!(i.dt, None);
        assert_eq!(i.record_stride, 1);
        assert_eq!(i.norm_drift_tolerance, DEFAULT_NORM_DRIFT_TOLERANCE);
        assert_eq!(c.collapse_epsilon, DEFAULT_COLLAPSE_EPSILON);
        assert_eq!(c.output.dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
        assert!(c.noise.is_none());
    }

    #[test]
    fn identity_collapse_operator_is_degenerate() {
        let text = MINIMAL.replace("a = \"sigma_z\"", "a = \"identity\"");
        let err = parse_config(&text).unwrap_err();
        assert!(err.mentions("degenerate collapse operator"), "{err}");
        assert!(err.mentions("hamiltonian.a"), "{err}");
    }

    #[test]
    fn string_gamma_is_a_type_error_naming_the_field() {
        let text = MINIMAL.replace("gamma = 100", "gamma = \"100\"");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.errors.len(), 1, "{err}");
        assert!(err.errors[0].starts_with("hamiltonian.gamma: expected a number, found string"), "{err}");
    }

    #[test]
    fn all_errors_are_reported() {
        let text = r#"
mode = "deterministic"
colapse_epsilon = 0.1
[hamiltonian]
h0 = [[0, 1], [2, 0]]
a = "zero"
gamma = "fast"
[integrator]
t_end = -1
"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.mentions("colapse_epsilon: unknown key"), "{err}");
        assert!(err.mentions("hamiltonian.gamma"), "{err}");
        assert!(err.mentions("hamiltonian.h0"), "{err}");
        assert!(err.mentions("not Hermitian"), "{err}");
        assert!(err.mentions("integrator.t_end: must be positive"), "{err}");
        assert!(err.errors.len() >= 4);
    }

    #[test]
    fn malformed_syntax() {
        let err = parse_config("[hamiltonian\nomega = 1").unwrap_err();
        assert!(err.errors[0].starts_with("malformed syntax"), "{err}");
    }

    #[test]
    fn missing_required_fields() {
        let err = parse_config("[hamiltonian]\nomega = 1\n[noise]\nseed = 3\n").unwrap_err();
        assert!(err.mentions("hamiltonian.h0: missing required key"));
        assert!(err.mentions("hamiltonian.a: missing required key"));
        assert!(err.mentions("noise.rate: missing required key"));
        assert!(err.mentions("noise.t_end: missing required key"));
    }

    #[test]
    fn mode_requirements() {
        let text = "[hamiltonian]\nh0 = \"zero\"\na = \"sigma_z\"\n";
        let c = parse_config(text).unwrap();
        assert!(c.check_mode(Mode::Figure1).is_ok());
        let err = c.check_mode(Mode::Deterministic).unwrap_err();
        assert!(err.mentions("hamiltonian.gamma"));
        assert!(err.mentions("[integrator]"));
        assert!(c.check_mode(Mode::Ensemble).unwrap_err().mentions("[noise]"));
        assert!(c.check_mode(Mode::Sweep).unwrap_err().mentions("[sweep]"));
        let err = parse_config(&format!("mode = \"ensemble\"\n{text}")).unwrap_err();
        assert!(err.mentions("[noise]"));
    }

    #[test]
    fn explicit_matrices_and_states() {
        let text = r#"
[hamiltonian]
omega = 2.0
h0 = [[0, [0, -1]], [[0, 1], 0]]
a = [[1, 0], [0, -1]]
gamma = -3
[initial]
amplitudes = [[1, 0], [0, 1]]
"#;
        let c = parse_config(text).unwrap();
        let h = c.hamiltonian.unwrap();
        assert_eq!(h.spec.h0(), &Operator::pauli_y());
        assert_eq!(h.spec.a(), &Operator::pauli_z());
        assert_eq!(h.spec.gamma(), -3.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((c.initial.state.amplitude(1) - Complex64::new(0.0, r)).norm() < 1e-15);
    }

    #[test]
    fn bloch_initial_state_is_in_the_eigenbasis() {
        let text = "[hamiltonian]\nh0 = \"zero\"\na = \"sigma_x\"\n[initial]\nbloch = [0, 0, 1]\n";
        let c = parse_config(text).unwrap();
        let (p0, _) = crate::analysis::born_probabilities(&c.initial.state, &Operator::pauli_x()).unwrap();
        assert!((p0 - 1.0).abs() < 1e-12);
        let bad = text.replace("[0, 0, 1]", "[0, 0, 0.5]");
        assert!(parse_config(&bad).unwrap_err().mentions("initial.bloch"));
    }

    #[test]
    fn initial_forms_are_exclusive() {
        let text = "[hamiltonian]\nh0 = \"zero\"\na = \"sigma_z\"\n[initial]\nstate = \"plus\"\nangle = 0.3\n";
        assert!(parse_config(text).unwrap_err().mentions("exactly one of"));
    }

    #[test]
    fn overrides_target_the_mode_section() {
        let text = format!("{MINIMAL}\n[noise]\nrate = 10\nt_end = 2\n");
        let o = Overrides {
            seed: Some(9),
            out_dir: Some(PathBuf::from("elsewhere")),
            dt: Some(1e-4),
            t_end: Some(1.0),
        };
        let c = parse_config_with(&text, &o, Some(Mode::Ensemble)).unwrap();
        let n = c.noise.as_ref().unwrap();
        assert_eq!((n.noise.seed, n.noise.dt, n.t_end), (9, 1e-4, 1.0));
        assert_eq!(c.integrator.as_ref().unwrap().t_end, 0.05);
        assert_eq!(c.output.dir, PathBuf::from("elsewhere"));
        let c = parse_config_with(MINIMAL, &o, Some(Mode::Deterministic)).unwrap();
        assert_eq!(c.integrator.as_ref().unwrap().dt, Some(1e-4));
    }

    #[test]
    fn near_degenerate_gap_rejected() {
        let text = MINIMAL.replace("a = \"sigma_z\"", "a = [[1.0, 0], [0, 0.9999999995]]");
        assert!(parse_config(&text).unwrap_err().mentions("degenerate collapse operator"));
    }
}
