use std::cmp::Ordering;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// One flat output record. Columns that do not apply to a row stay empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultRow {
    pub kind: String,
    /// What `value` holds, or which series the row belongs to.
    pub label: String,
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub zeta: Option<f64>,
    pub censored: Option<bool>,
    pub start: Option<String>,
    pub t: Option<u64>,
    pub s: Option<f64>,
    pub d_tv: Option<f64>,
    pub prob: Option<f64>,
    pub up: Option<f64>,
    pub down: Option<f64>,
    pub hold: Option<f64>,
    pub gap: Option<f64>,
    pub lambda2: Option<f64>,
    pub phi_star: Option<f64>,
    pub dirichlet_bound: Option<f64>,
    pub tau: Option<u64>,
    pub r: Option<usize>,
    pub u: Option<usize>,
    pub v: Option<usize>,
    pub in_xi: Option<bool>,
    pub in_omega0: Option<bool>,
    pub eps: Option<f64>,
    pub value: Option<f64>,
    pub seed: Option<u64>,
    pub replica: Option<u64>,
}

pub const HEADER: [&str; 29] = [
    "kind", "label", "n", "beta", "delta", "zeta", "censored", "start", "t", "s", "d_tv", "prob", "up", "down",
    "hold", "gap", "lambda2", "phi_star", "dirichlet_bound", "tau", "r", "u", "v", "in_xi", "in_omega0", "eps",
    "value", "seed", "replica",
];

/// 17 significant digits, enough to read back the exact double.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // keeps the sign of -0.0 and avoids "0.0000000000000000e0"
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    format!("{x:.16e}")
}

fn cell<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn fcell(x: &Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

impl ResultRow {
    /// A row with the model columns filled in.
    pub fn for_params(kind: &str, label: impl Into<String>, params: &ModelParams, censored: bool) -> Self {
        Self {
            kind: kind.into(),
            label: label.into(),
            n: Some(params.n),
            beta: Some(params.beta),
            delta: Some(params.delta),
            zeta: params.zeta,
            censored: Some(censored),
            ..Default::default()
        }
    }

    pub fn record(&self) -> Vec<String> {
        vec![
            self.kind.clone(),
            self.label.clone(),
            cell(&self.n),
            fcell(&self.beta),
            fcell(&self.delta),
            fcell(&self.zeta),
            cell(&self.censored),
            self.start.clone().unwrap_or_default(),
            cell(&self.t),
            fcell(&self.s),
            fcell(&self.d_tv),
            fcell(&self.prob),
            fcell(&self.up),
            fcell(&self.down),
            fcell(&self.hold),
            fcell(&self.gap),
            fcell(&self.lambda2),
            fcell(&self.phi_star),
            fcell(&self.dirichlet_bound),
            cell(&self.tau),
            cell(&self.r),
            cell(&self.u),
            cell(&self.v),
            cell(&self.in_xi),
            cell(&self.in_omega0),
            fcell(&self.eps),
            fcell(&self.value),
            cell(&self.seed),
            cell(&self.replica),
        ]
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        let beta = |r: &Self| r.beta.unwrap_or(f64::NEG_INFINITY);
        self.n
            .cmp(&other.n)
            .then(beta(self).total_cmp(&beta(other)))
            .then(self.replica.cmp(&other.replica))
            .then(self.t.cmp(&other.t))
    }
}

/// Stable sort by `(n, beta, replica, t)`; rows with equal keys keep their
/// emission order.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(ResultRow::sort_key_cmp);
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io_err = |e: csv::Error| Error::InvalidParameter(format!("writing csv: {e}"));
    w.write_record(HEADER).map_err(io_err)?;
    for row in rows {
        w.write_record(row.record()).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("writing csv: {e}")))?;
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Sidecar metadata written next to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar<S: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub spec: S,
    pub rows: usize,
    pub wall_clock_seconds: f64,
}

impl<S: Serialize> Sidecar<S> {
    pub fn new(spec: S, rows: usize, wall_clock_seconds: f64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            spec,
            rows,
            wall_clock_seconds,
        }
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn io_error(path: &Path, e: io::Error) -> Error {
    Error::InvalidParameter(format!("{}: {e}", path.display()))
}

/// Writes `contents` to a temporary file in the target directory and renames
/// it into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut tmp_name = path.file_name().unwrap_or_default().to_owned();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    fs::write(&tmp, contents).map_err(|e| io_error(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}

/// Writes the CSV and its JSON sidecar.
pub fn write_outputs<S: Serialize>(path: &Path, rows: &[ResultRow], sidecar: &Sidecar<S>) -> Result<()> {
    write_atomic(path, csv_string(rows).as_bytes())?;
    let json = serde_json::to_string_pretty(sidecar).expect("sidecar serializes");
    write_atomic(&sidecar_path(path), json.as_bytes())
}
