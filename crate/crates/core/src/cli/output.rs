//! CSV files with `#` metadata lines.
//!
//! Numbers are written in Rust's shortest round-trip form, so re-reading a
//! file reproduces every value exactly, except that negative zero reads
//! back as zero. No field depends on the clock.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::analysis::{EnsembleStats, SweepRow};
use crate::deterministic::{CollapseReport, Trajectory};
use crate::quantum::{to_eigenbasis_of_a, BlochVector, Complex64, HamiltonianSpec, StateVector};
use crate::stochastic::StochasticTrajectory;

use super::CliError;

pub const TRAJECTORY_COLUMNS: [&str; 12] = [
    "t", "x", "y", "z", "re_c0", "im_c0", "re_c1", "im_c1", "prob0", "prob1", "expA", "norm_drift",
];
pub const WIENER_COLUMN: &str = "W";
pub const SUMMARY_COLUMNS: [&str; 12] = [
    "gamma",
    "regime",
    "eig0_re",
    "eig0_im",
    "eig1_re",
    "eig1_im",
    "collapsed",
    "target",
    "collapse_time",
    "final_x",
    "final_y",
    "final_z",
];
pub const OUTCOME_COLUMNS: [&str; 4] = ["index", "final_z", "outcome", "collapse_time"];
pub const MOMENT_COLUMNS: [&str; 4] = ["t", "mean_z", "variance_z", "std_error_z"];
pub const STATS_COLUMNS: [&str; 2] = ["key", "value"];

/// Ordered `# key: value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Shortest round-trip text, switching to exponent form for very small or
/// very large magnitudes. Negative zero is written as `0`.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if x.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

/// Writes metadata, a header and rows to `path`, creating parent directories.
pub fn write_csv(path: &Path, metadata: &Metadata, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    let mut file = BufWriter::new(File::create(path).map_err(io)?);
    for (k, v) in &metadata.0 {
        writeln!(file, "# {k}: {}", v.replace('\n', " ")).map_err(io)?;
    }
    let csv_error = |e: csv::Error| CliError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(header).map_err(csv_error)?;
    for row in rows {
        writer.write_record(row).map_err(csv_error)?;
    }
    let file = writer.into_inner().map_err(|e| CliError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    file.into_inner()
        .map_err(|e| io(e.into_error()))?
        .sync_all()
        .map_err(io)
}

/// A file written by [`write_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub path: PathBuf,
    pub metadata: Metadata,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column_index(&self, name: &str) -> Result<usize, CliError> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| CliError::Csv {
            path: self.path.clone(),
            message: format!("missing column `{name}`"),
        })
    }

    /// Raw text of a column.
    pub fn column_text(&self, name: &str) -> Result<Vec<&str>, CliError> {
        let k = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[k].as_str()).collect())
    }

    /// Numeric column; every cell must parse.
    pub fn column(&self, name: &str) -> Result<Vec<f64>, CliError> {
        self.column_text(name)?
            .into_iter()
            .enumerate()
            .map(|(i, cell)| {
                cell.parse::<f64>().map_err(|_| CliError::Csv {
                    path: self.path.clone(),
                    message: format!("column `{name}` row {i}: \"{cell}\" is not a number"),
                })
            })
            .collect()
    }

    /// Value of a `key,value` table.
    pub fn value(&self, key: &str) -> Result<&str, CliError> {
        let k = self.column_index("key")?;
        let v = self.column_index("value")?;
        self.rows
            .iter()
            .find(|r| r[k] == key)
            .map(|r| r[v].as_str())
            .ok_or_else(|| CliError::Csv {
                path: self.path.clone(),
                message: format!("missing key `{key}`"),
            })
    }
}

/// Reads a CSV with leading `# key: value` lines.
pub fn read_csv(path: &Path) -> Result<CsvTable, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut metadata = Metadata::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let body = line.trim_start_matches('#').trim_start();
        match body.split_once(": ") {
            Some((k, v)) => metadata.push(k, v),
            None => metadata.push(body, ""),
        };
    }
    let csv_error = |e: csv::Error| CliError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()
        .map_err(csv_error)?;
    Ok(CsvTable {
        path: path.to_path_buf(),
        metadata,
        headers,
        rows,
    })
}

/// Amplitudes of `psi` in the eigenbasis of `A`.
struct EigenProjector {
    basis_adjoint: nalgebra::DMatrix<Complex64>,
}

impl EigenProjector {
    fn new(spec: &HamiltonianSpec) -> Result<Self, CliError> {
        let (_, basis) = to_eigenbasis_of_a(spec)?;
        Ok(Self {
            basis_adjoint: basis.adjoint(),
        })
    }

    fn row(&self, t: f64, bloch: &BlochVector, psi: &StateVector, exp_a: f64, drift: f64) -> Vec<String> {
        let c = &self.basis_adjoint * psi.amplitudes();
        vec![
            format_f64(t),
            format_f64(bloch.x()),
            format_f64(bloch.y()),
            format_f64(bloch.z()),
            format_f64(c[0].re),
            format_f64(c[0].im),
            format_f64(c[1].re),
            format_f64(c[1].im),
            format_f64(c[0].norm_sqr()),
            format_f64(c[1].norm_sqr()),
            format_f64(exp_a),
            format_f64(drift),
        ]
    }
}

pub fn trajectory_rows(traj: &Trajectory, spec: &HamiltonianSpec) -> Result<Vec<Vec<String>>, CliError> {
    let p = EigenProjector::new(spec)?;
    Ok((0..traj.len())
        .map(|k| p.row(traj.times[k], &traj.bloch[k], &traj.states[k], traj.exp_a[k], traj.norm_drift[k]))
        .collect())
}

pub fn stochastic_rows(traj: &StochasticTrajectory, spec: &HamiltonianSpec) -> Result<Vec<Vec<String>>, CliError> {
    let p = EigenProjector::new(spec)?;
    Ok((0..traj.len())
        .map(|k| {
            let mut row = p.row(traj.times[k], &traj.bloch[k], &traj.states[k], traj.exp_a[k], traj.norm_error[k]);
            row.push(format_f64(traj.wiener_path[k]));
            row
        })
        .collect())
}

pub fn stochastic_columns() -> Vec<&'static str> {
    let mut cols = TRAJECTORY_COLUMNS.to_vec();
    cols.push(WIENER_COLUMN);
    cols
}

fn collapse_cells(c: &CollapseReport) -> [String; 3] {
    [
        u8::from(c.collapsed).to_string(),
        c.target_index.map(|k| k.to_string()).unwrap_or_default(),
        optional(c.collapse_time),
    ]
}

pub fn summary_rows(rows: &[SweepRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            let [e0, e1] = r.regime.eigenvalues;
            let mut row = vec![
                format_f64(r.gamma),
                r.regime.regime.as_str().to_string(),
                format_f64(e0.re),
                format_f64(e0.im),
                format_f64(e1.re),
                format_f64(e1.im),
            ];
            row.extend(collapse_cells(&r.collapse));
            row.extend(r.final_bloch.as_array().map(format_f64));
            row
        })
        .collect()
}

pub fn outcome_rows(stats: &EnsembleStats) -> Vec<Vec<String>> {
    stats
        .outcomes
        .iter()
        .map(|o| {
            vec![
                o.index.to_string(),
                format_f64(o.final_z),
                o.collapse.target_index.map(|k| k.to_string()).unwrap_or_default(),
                optional(o.collapse.collapse_time),
            ]
        })
        .collect()
}

pub fn moment_rows(stats: &EnsembleStats) -> Vec<Vec<String>> {
    stats
        .z_moments
        .iter()
        .map(|m| vec![format_f64(m.t), format_f64(m.mean), format_f64(m.variance), format_f64(m.std_error)])
        .collect()
}

/// `key,value` pairs summarising an ensemble; empty values mean undefined.
pub fn stats_pairs(stats: &EnsembleStats) -> Vec<(&'static str, String)> {
    let (lo, hi) = stats.fraction_0_ci.unzip();
    vec![
        ("n_trajectories", stats.n_trajectories.to_string()),
        ("count_to_0", stats.count_to_0.to_string()),
        ("count_to_1", stats.count_to_1.to_string()),
        ("count_uncollapsed", stats.count_uncollapsed.to_string()),
        ("fraction_0", optional(stats.fraction_0)),
        ("fraction_0_ci_low", optional(lo)),
        ("fraction_0_ci_high", optional(hi)),
        ("born_p0", format_f64(stats.born_p0)),
        ("born_sigma", format_f64(stats.born_sigma())),
        ("uncollapsed_fraction", format_f64(stats.uncollapsed_fraction())),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_round_trips() {
        for x in [0.0, 1.0, -0.5, 1e-300, 3.0e-5, 0.1 + 0.2, 123456.789, 2.5e20, -7.0e-9] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_f64(1e-300), "1e-300");
        assert_eq!(format_f64(0.25), "0.25");
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/table.csv");
        let mut meta = Metadata::new();
        meta.push("version", "1").push("note", "a: b");
        let rows = vec![vec!["0".to_string(), String::new()], vec!["1e-7".to_string(), "x".to_string()]];
        write_csv(&path, &meta, &["t", "label"], &rows).unwrap();
        let table = read_csv(&path).unwrap();
        assert_eq!(table.metadata, meta);
        assert_eq!(table.headers, ["t", "label"]);
        assert_eq!(table.rows, rows);
        assert_eq!(table.column("t").unwrap(), [0.0, 1e-7]);
        assert!(table.column("label").is_err());
        let err = table.column("z").unwrap_err().to_string();
        assert!(err.contains("missing column `z`"), "{err}");
    }
}
