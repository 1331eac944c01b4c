//! On-disk artifacts: hashed CSV tables and JSON manifests/certificates.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use varqd_core::propagate::{CertificateReport, IntegratorStats};
use varqd_core::{Principle, SlackModel};

use crate::config::{Kind, Scenario};
use crate::error::{CliError, IoContext, Result};

pub const TRAJECTORY: &str = "trajectory.csv";
pub const CERTIFICATE_JSON: &str = "certificate.json";
pub const CERTIFICATE_CSV: &str = "certificate.csv";
pub const MANIFEST: &str = "manifest.json";
pub const SNAPSHOTS: &str = "snapshots";
pub const REFERENCE: &str = "reference";

/// 17 significant digits: round-trips every `f64`.
pub fn fmt(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimates {
    /// `‖u_dt(T) - u_{dt/2}(T)‖`.
    pub integrator_gap: Option<f64>,
    /// `‖ψ_dt(T) - ψ_{dt/2}(T)‖` of the reference.
    pub reference_gap: Option<f64>,
    pub spectral_tail: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub kind: Kind,
    pub principle: Principle,
    pub config_hash: String,
    pub physics_hash: String,
    pub config: Scenario,
    /// The pipeline draws no random numbers.
    pub seed: Option<u64>,
    pub final_time: f64,
    pub stats: Option<IntegratorStats>,
    pub estimates: ErrorEstimates,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(scenario: &Scenario, config_hash: &str, physics_hash: &str) -> Self {
        Manifest {
            tool: "varqd".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            kind: scenario.kind,
            principle: scenario.principle,
            config_hash: config_hash.to_string(),
            physics_hash: physics_hash.to_string(),
            config: scenario.clone(),
            seed: None,
            final_time: 0.0,
            stats: None,
            estimates: ErrorEstimates::default(),
            files: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub config_hash: String,
    pub physics_hash: String,
    /// Config hash of the reference run joined in, if any.
    pub reference_hash: Option<String>,
    #[serde(flatten)]
    pub report: CertificateReport,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
    text.push('\n');
    fs::write(path, text).at(path)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).at(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::artifact(path, e.to_string()))
}

/// Writes `# config_hash=<hash>`, then a CSV header and rows.
pub fn write_csv<W: Write>(
    out: W,
    hash: &str,
    header: &[String],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let mut out = out;
    writeln!(out, "# config_hash={hash}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

pub fn write_csv_file(
    path: &Path,
    hash: &str,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<()> {
    let file = fs::File::create(path).at(path)?;
    write_csv(std::io::BufWriter::new(file), hash, header, rows).at(path)
}

/// A numeric CSV table read back from disk; blank cells are `None`.
#[derive(Debug, Clone)]
pub struct Table {
    pub hash: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).at(path)?;
        let mut first = String::new();
        BufReader::new(&file).read_line(&mut first).at(path)?;
        let hash = first
            .trim()
            .strip_prefix("# config_hash=")
            .map(str::to_string);
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| CliError::artifact(path, e.to_string()))?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::artifact(path, e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| CliError::artifact(path, e.to_string()))?;
            let row = rec
                .iter()
                .map(|cell| {
                    if cell.is_empty() {
                        Ok(None)
                    } else {
                        cell.parse::<f64>().map(Some).map_err(|_| {
                            CliError::artifact(path, format!("non-numeric cell `{cell}`"))
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Table {
            hash,
            headers,
            rows,
        })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r.get(i).copied().flatten().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    pub fn require(&self, name: &str, path: &Path) -> Result<Vec<f64>> {
        self.column(name)
            .ok_or_else(|| CliError::artifact(path, format!("missing column `{name}`")))
    }
}

pub fn certificate_rows(report: &CertificateReport) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["t", "epsilon", "bound", "true_error", "slack", "margin"]
        .map(String::from)
        .to_vec();
    let rows = report
        .samples
        .iter()
        .map(|s| {
            vec![
                fmt(s.t),
                fmt(s.epsilon),
                fmt(s.bound),
                fmt_opt(s.true_error),
                fmt_opt(s.slack),
                fmt_opt(s.margin),
            ]
        })
        .collect();
    (header, rows)
}

/// Writes `certificate.json` and `certificate.csv` into `dir`.
pub fn write_certificate(dir: &Path, cert: &CertificateFile) -> Result<()> {
    write_json(&dir.join(CERTIFICATE_JSON), cert)?;
    let (header, rows) = certificate_rows(&cert.report);
    write_csv_file(
        &dir.join(CERTIFICATE_CSV),
        &cert.config_hash,
        &header,
        &rows,
    )
}

/// Slack model assembled from the recorded gap estimates.
pub fn slack_model(
    run: &ErrorEstimates,
    dt: f64,
    reference: &ErrorEstimates,
    dt_ref: f64,
    t: f64,
    order: i32,
) -> Option<SlackModel> {
    if run.integrator_gap.is_none()
        && reference.reference_gap.is_none()
        && reference.spectral_tail.is_none()
    {
        return None;
    }
    Some(SlackModel {
        c_int: run
            .integrator_gap
            .map(|g| SlackModel::constant_from_halving(g, dt, t, order))
            .unwrap_or(0.0),
        dt,
        c_ref: reference
            .reference_gap
            .map(|g| SlackModel::constant_from_halving(g, dt_ref, t, 2))
            .unwrap_or(0.0),
        dt_ref,
        tail: reference.spectral_tail.unwrap_or(0.0),
    })
}
