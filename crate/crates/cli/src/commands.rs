//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::Serialize;

use varqd_core::frozen;
use varqd_core::hartree::assemble_product;
use varqd_core::propagate::{
    certify_series, integrate, times_match, CertificateReport, HartreeFlow, IntegratorStats,
};
use varqd_core::reference::{spectral_tail, split_step_with, ReferenceRun};
use varqd_core::{
    FrozenModel, FrozenParams, GridHamiltonian, GridWavefunction, HartreeModel, HartreeState,
    IntegratorConfig, Method,
};

use crate::config::{override_value, Initial, Kind, Prepared, Scenario};
use crate::error::{CliError, IoContext, Result};
use crate::output::{
    self, fmt, slack_model, write_certificate, write_csv, write_csv_file, write_json,
    CertificateFile, ErrorEstimates, Manifest, Table, MANIFEST, REFERENCE, SNAPSHOTS, TRAJECTORY,
};
use crate::snapshot::{self, FULL_STATE};

/// What a finished run left behind.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub final_time: f64,
    pub certificate: Option<CertificateReport>,
}

/// Time series and states of a variational run, independent of its kind.
struct VariationalOutput {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    times: Vec<f64>,
    epsilon: Vec<f64>,
    bound: Vec<f64>,
    stats: IntegratorStats,
    /// `(t, particle, state)` for every stored state.
    snapshots: Vec<(f64, u32, GridWavefunction)>,
    integrator_gap: Option<f64>,
}

pub fn default_output_dir(scenario: &Scenario, cli: Option<&Path>) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| scenario.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("varqd-out"))
}

pub fn run(config: &Path, out: Option<&Path>) -> Result<RunOutcome> {
    let scenario = Scenario::load(config)?;
    let dir = default_output_dir(&scenario, out);
    run_scenario(scenario, &dir)
}

pub fn run_scenario(scenario: Scenario, dir: &Path) -> Result<RunOutcome> {
    let prepared = scenario.prepare()?;
    fs::create_dir_all(dir.join(SNAPSHOTS)).at(dir)?;
    info!(
        "{} run, config hash {}, writing to {}",
        prepared.scenario.kind,
        &prepared.config_hash[..12],
        dir.display()
    );
    if prepared.scenario.kind == Kind::Reference {
        let (run, manifest) = reference_run(&prepared, dir)?;
        write_json(&dir.join(MANIFEST), &manifest)?;
        return Ok(RunOutcome {
            dir: dir.to_path_buf(),
            final_time: run.snapshots.last().map(|s| s.0).unwrap_or(0.0),
            certificate: None,
        });
    }

    let cfg = prepared.integrator();
    let data = match &prepared.initial {
        Initial::Packet(p) => frozen_run(&prepared, p, &cfg)?,
        Initial::Product(_) => hartree_run(&prepared, &cfg)?,
    };
    let hash = prepared.config_hash.clone();
    write_csv_file(&dir.join(TRAJECTORY), &hash, &data.header, &data.rows)?;
    let prefix = snapshot::hash_prefix(&hash);
    let mut files = vec![TRAJECTORY.to_string()];
    for (k, (t, particle, psi)) in data.snapshots.iter().enumerate() {
        let name = if *particle == FULL_STATE {
            format!("u_{k:06}.bin")
        } else {
            format!("u_{k:06}_p{}.bin", particle + 1)
        };
        snapshot::write(
            &dir.join(SNAPSHOTS).join(&name),
            psi,
            *t,
            prepared.spec.hbar,
            *particle,
            prefix,
        )?;
    }
    files.push(format!("{SNAPSHOTS}/"));

    let mut manifest = Manifest::new(&prepared.scenario, &hash, &prepared.physics_hash);
    manifest.final_time = *data.times.last().unwrap_or(&0.0);
    manifest.stats = Some(data.stats.clone());
    manifest.estimates.integrator_gap = data.integrator_gap;

    let mut truth = None;
    let mut ref_estimates = ErrorEstimates::default();
    let mut dt_ref = 0.0;
    let mut reference_hash = None;
    if prepared.scenario.reference.is_some() {
        let ref_dir = dir.join(REFERENCE);
        fs::create_dir_all(ref_dir.join(SNAPSHOTS)).at(&ref_dir)?;
        let (run, ref_manifest) = reference_run(&prepared, &ref_dir)?;
        write_json(&ref_dir.join(MANIFEST), &ref_manifest)?;
        truth = Some(join_truth(
            data.snapshots
                .iter()
                .filter(|s| s.1 == FULL_STATE)
                .map(|(t, _, psi)| (*t, psi)),
            &run,
        )?);
        ref_estimates = ref_manifest.estimates;
        dt_ref = run.dt;
        reference_hash = Some(ref_manifest.config_hash);
        files.push(format!("{REFERENCE}/"));
    }
    let slack = slack_model(
        &manifest.estimates,
        cfg.dt,
        &ref_estimates,
        dt_ref,
        manifest.final_time,
        4,
    );
    let report = certify_series(
        &data.times,
        &data.epsilon,
        &data.bound,
        &data.stats,
        truth.as_deref(),
        slack,
    )?;
    manifest.estimates.reference_gap = ref_estimates.reference_gap;
    manifest.estimates.spectral_tail = ref_estimates.spectral_tail;
    let cert = CertificateFile {
        config_hash: hash.clone(),
        physics_hash: prepared.physics_hash.clone(),
        reference_hash,
        report: report.clone(),
    };
    write_certificate(dir, &cert)?;
    files.push(output::CERTIFICATE_JSON.to_string());
    files.push(output::CERTIFICATE_CSV.to_string());
    files.push(MANIFEST.to_string());
    manifest.files = files;
    write_json(&dir.join(MANIFEST), &manifest)?;
    if report.violated {
        log::warn!("true error exceeds the bound plus slack at some snapshot");
    }
    Ok(RunOutcome {
        dir: dir.to_path_buf(),
        final_time: manifest.final_time,
        certificate: Some(report),
    })
}

fn frozen_run(
    p: &Prepared,
    params: &FrozenParams,
    cfg: &IntegratorConfig,
) -> Result<VariationalOutput> {
    let model = FrozenModel::on_grid(&p.spec, p.scenario.principle, &p.grid)?;
    let traj = integrate(&model, params.clone(), cfg)?;
    let d = params.dim();
    let mut header = vec!["t".to_string(), "theta".to_string()];
    header.extend((1..=d).map(|m| format!("q_{m}")));
    header.extend((1..=d).map(|m| format!("p_{m}")));
    header.extend(["norm", "E0", "epsilon", "bound"].map(String::from));
    let mut rows = Vec::with_capacity(traj.states.len());
    let mut snapshots = Vec::with_capacity(traj.states.len());
    for (i, s) in &traj.states {
        let t = traj.times[*i];
        let o = &traj.observations[*i];
        let mut row = vec![fmt(t), fmt(s.theta)];
        row.extend(s.q.iter().chain(&s.p).map(|&x| fmt(x)));
        row.extend([o.norm, o.energy, o.epsilon, traj.bound[*i]].map(fmt));
        rows.push(row);
        snapshots.push((t, FULL_STATE, frozen::synthesize(s, &p.grid)?));
    }
    let integrator_gap = if p.scenario.integrator.estimate_error {
        let fine = integrate(&model, params.clone(), &refined(cfg))?;
        let a = frozen::synthesize(traj.final_state().expect("final state kept"), &p.grid)?;
        let b = frozen::synthesize(fine.final_state().expect("final state kept"), &p.grid)?;
        Some(a.distance(&b)?)
    } else {
        None
    };
    Ok(VariationalOutput {
        header,
        rows,
        epsilon: traj.epsilon(),
        times: traj.times,
        bound: traj.bound,
        stats: traj.stats,
        snapshots,
        integrator_gap,
    })
}

/// Half the step (RK4) or a 32× tighter tolerance (RK45), keeping only the end.
fn refined(cfg: &IntegratorConfig) -> IntegratorConfig {
    let mut fine = cfg.clone();
    match cfg.method {
        Method::Rk4 => fine.dt = cfg.dt / 2.0,
        Method::Rk45 => fine.tolerance = cfg.tolerance / 32.0,
    }
    fine.store_every = usize::MAX;
    fine
}

fn product_states(state: &HartreeState) -> Result<Vec<(u32, GridWavefunction)>> {
    if state.len() <= 2 {
        Ok(vec![(FULL_STATE, assemble_product(state)?)])
    } else {
        Ok(state
            .particles()
            .iter()
            .enumerate()
            .map(|(n, phi)| (n as u32, phi.clone()))
            .collect())
    }
}

/// `‖u - u'‖`, or the bound `Σ‖φ_n - φ'_n‖` when the product is not assembled.
fn product_distance(a: &HartreeState, b: &HartreeState) -> Result<f64> {
    if a.len() <= 2 {
        Ok(assemble_product(a)?.distance(&assemble_product(b)?)?)
    } else {
        a.particles()
            .iter()
            .zip(b.particles())
            .map(|(x, y)| Ok(x.distance(y)?))
            .sum()
    }
}

fn hartree_run(p: &Prepared, cfg: &IntegratorConfig) -> Result<VariationalOutput> {
    let state0 = p.hartree_state()?;
    let n = state0.len();
    let model =
        HartreeModel::new(&p.spec, &vec![p.grid.clone(); n])?.with_principle(p.scenario.principle);
    let flow = HartreeFlow::new(model);
    let traj = integrate(&flow, state0.clone(), cfg)?;
    let mut header: Vec<String> = ["t", "norm", "E0", "c1", "epsilon", "bound"]
        .map(String::from)
        .to_vec();
    header.extend((1..=n).map(|k| format!("norm_{k}")));
    header.extend((1..=n).map(|k| format!("eps_kin_{k}")));
    let mut rows = Vec::with_capacity(traj.states.len());
    let mut snapshots = Vec::new();
    for (i, s) in &traj.states {
        let t = traj.times[*i];
        let o = &traj.observations[*i];
        let mut row = vec![
            fmt(t),
            fmt(o.norm),
            fmt(o.energy),
            fmt(o.gauge.unwrap_or(f64::NAN)),
            fmt(o.epsilon),
            fmt(traj.bound[*i]),
        ];
        row.extend(
            o.particle_norms
                .iter()
                .chain(&o.particle_kinetic)
                .map(|&x| fmt(x)),
        );
        rows.push(row);
        for (particle, psi) in product_states(s)? {
            snapshots.push((t, particle, psi));
        }
    }
    let integrator_gap = if p.scenario.integrator.estimate_error {
        let fine = integrate(&flow, state0, &refined(cfg))?;
        Some(product_distance(
            traj.final_state().expect("final state kept"),
            fine.final_state().expect("final state kept"),
        )?)
    } else {
        None
    };
    Ok(VariationalOutput {
        header,
        rows,
        epsilon: traj.epsilon(),
        times: traj.times,
        bound: traj.bound,
        stats: traj.stats,
        snapshots,
        integrator_gap,
    })
}

/// Runs the split-step reference and writes its snapshots and time series.
fn reference_run(p: &Prepared, dir: &Path) -> Result<(ReferenceRun, Manifest)> {
    let (steps, dt, every) = p
        .reference_schedule()
        .expect("reference requested by the scenario");
    let strict = p.scenario.reference.as_ref().is_some_and(|r| r.strict);
    let estimate = match p.scenario.kind {
        Kind::Reference => p.scenario.integrator.estimate_error,
        _ => p
            .scenario
            .reference
            .as_ref()
            .is_some_and(|r| r.estimate_error),
    };
    let psi0 = p.initial_wavefunction()?;
    let run = split_step_with(&psi0, &p.spec, dt, steps, every, strict)?;
    let hash = p.config_hash.clone();
    let prefix = snapshot::hash_prefix(&hash);
    let gh = GridHamiltonian::new(&p.spec, &p.reference_grid()?)?;
    let header = ["t", "norm", "energy"].map(String::from).to_vec();
    let mut rows = Vec::with_capacity(run.snapshots.len());
    for (k, (t, psi)) in run.snapshots.iter().enumerate() {
        snapshot::write(
            &dir.join(SNAPSHOTS).join(format!("psi_{k:06}.bin")),
            psi,
            *t,
            p.spec.hbar,
            FULL_STATE,
            prefix,
        )?;
        rows.push(vec![fmt(*t), fmt(psi.norm()), fmt(gh.energy(psi)?)]);
    }
    write_csv_file(&dir.join(TRAJECTORY), &hash, &header, &rows)?;

    let mut manifest = Manifest::new(&p.scenario, &hash, &p.physics_hash);
    manifest.kind = Kind::Reference;
    manifest.final_time = run.snapshots.last().map(|s| s.0).unwrap_or(0.0);
    manifest.estimates.spectral_tail = Some(spectral_tail(run.final_state()));
    if estimate {
        let fine = split_step_with(&psi0, &p.spec, dt / 2.0, 2 * steps, 2 * steps, strict)?;
        manifest.estimates.reference_gap = Some(run.final_state().distance(fine.final_state())?);
    }
    manifest.files = vec![
        TRAJECTORY.to_string(),
        format!("{SNAPSHOTS}/"),
        MANIFEST.to_string(),
    ];
    Ok((run, manifest))
}

fn join_truth<'a>(
    states: impl Iterator<Item = (f64, &'a GridWavefunction)>,
    run: &ReferenceRun,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (t, u) in states {
        if let Ok(psi) = run.snapshot_at(t) {
            out.push((t, u.distance(psi)?));
        }
    }
    if out.is_empty() {
        return Err(CliError::Incompatible(
            "no run snapshot coincides with a reference snapshot".into(),
        ));
    }
    Ok(out)
}

/// Joins a variational run with a reference run on disk.
pub fn certify(run_dir: &Path, ref_dir: &Path, out: Option<&Path>) -> Result<CertificateReport> {
    let run: Manifest = output::read_json(&run_dir.join(MANIFEST))?;
    let reference: Manifest = output::read_json(&ref_dir.join(MANIFEST))?;
    if reference.kind != Kind::Reference {
        return Err(CliError::Incompatible(format!(
            "{} is not a reference run",
            ref_dir.display()
        )));
    }
    if run.kind == Kind::Reference {
        return Err(CliError::Incompatible(format!(
            "{} is a reference run, not a variational one",
            run_dir.display()
        )));
    }
    if run.physics_hash != reference.physics_hash {
        return Err(CliError::Incompatible(format!(
            "physics hash mismatch: run {} vs reference {}; refusing to certify",
            &run.physics_hash[..12],
            &reference.physics_hash[..12]
        )));
    }
    let traj_path = run_dir.join(TRAJECTORY);
    let table = Table::read(&traj_path)?;
    if table.hash.as_deref() != Some(run.config_hash.as_str()) {
        return Err(CliError::Incompatible(format!(
            "{} does not carry the manifest's config hash",
            traj_path.display()
        )));
    }
    let times = table.require("t", &traj_path)?;
    let epsilon = table.require("epsilon", &traj_path)?;
    let bound = table.require("bound", &traj_path)?;

    let run_snaps = load_snapshots(&run_dir.join(SNAPSHOTS), &run.config_hash)?;
    let ref_snaps = load_snapshots(&ref_dir.join(SNAPSHOTS), &reference.config_hash)?;
    let mut truth = Vec::new();
    for (t, u) in &run_snaps {
        if let Some((_, psi)) = ref_snaps.iter().find(|(s, _)| times_match(*s, *t)) {
            if u.grid() != psi.grid() {
                return Err(CliError::Incompatible(format!(
                    "run and reference snapshots at t = {t} live on different grids"
                )));
            }
            truth.push((*t, u.distance(psi)?));
        }
    }
    if truth.is_empty() {
        return Err(CliError::Incompatible(
            "no run snapshot coincides with a reference snapshot".into(),
        ));
    }
    let stats = run.stats.clone().unwrap_or_default();
    let dt_ref = match &reference.config.reference {
        Some(r) if reference.config.kind != Kind::Reference => r.dt,
        _ => reference.config.integrator.dt,
    };
    let slack = slack_model(
        &run.estimates,
        run.config.integrator.dt,
        &reference.estimates,
        dt_ref,
        run.final_time,
        4,
    );
    let report = certify_series(&times, &epsilon, &bound, &stats, Some(&truth), slack)?;
    let cert = CertificateFile {
        config_hash: run.config_hash.clone(),
        physics_hash: run.physics_hash.clone(),
        reference_hash: Some(reference.config_hash.clone()),
        report: report.clone(),
    };
    let dir = out.unwrap_or(run_dir);
    fs::create_dir_all(dir).at(dir)?;
    write_certificate(dir, &cert)?;
    Ok(report)
}

fn load_snapshots(dir: &Path, config_hash: &str) -> Result<Vec<(f64, GridWavefunction)>> {
    let prefix = snapshot::hash_prefix(config_hash);
    snapshot::read_dir(dir)?
        .into_iter()
        .map(|s| {
            if s.header.hash_prefix != prefix {
                Err(CliError::Incompatible(format!(
                    "snapshot in {} at t = {} carries a foreign config hash",
                    dir.display(),
                    s.header.time
                )))
            } else {
                Ok((s.header.time, s.psi))
            }
        })
        .collect()
}

/// Per-run summary line of a comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub dir: PathBuf,
    pub kind: Kind,
    pub principle: String,
    pub bound: f64,
    pub true_error: Option<f64>,
    /// Largest `|Δq|`, `|Δp|` against the first run (frozen runs only).
    pub max_dq: Option<f64>,
    pub max_dp: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<CompareRow>,
    pub hash: String,
}

impl Comparison {
    pub fn write<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        write_csv(out, &self.hash, &self.header, &self.rows)
    }
}

struct Loaded {
    dir: PathBuf,
    manifest: Manifest,
    table: Table,
    certificate: Option<Table>,
}

fn columns_matching(table: &Table, prefix: &str) -> Vec<usize> {
    table
        .headers
        .iter()
        .enumerate()
        .filter(|(_, h)| {
            h.strip_prefix(prefix)
                .is_some_and(|rest| rest.parse::<usize>().is_ok())
        })
        .map(|(i, _)| i)
        .collect()
}

pub fn compare(dirs: &[PathBuf]) -> Result<Comparison> {
    if dirs.is_empty() {
        return Err(CliError::invalid(
            "compare",
            "needs at least one run directory",
        ));
    }
    let mut runs = Vec::with_capacity(dirs.len());
    for dir in dirs {
        let manifest: Manifest = output::read_json(&dir.join(MANIFEST))?;
        if manifest.kind == Kind::Reference {
            return Err(CliError::Incompatible(format!(
                "{} is a reference run; compare variational runs",
                dir.display()
            )));
        }
        let table = Table::read(&dir.join(TRAJECTORY))?;
        let cert_path = dir.join(output::CERTIFICATE_CSV);
        let certificate = if cert_path.exists() {
            Some(Table::read(&cert_path)?)
        } else {
            None
        };
        runs.push(Loaded {
            dir: dir.clone(),
            manifest,
            table,
            certificate,
        });
    }
    let first = &runs[0];
    for r in &runs[1..] {
        if r.manifest.config.system != first.manifest.config.system {
            return Err(CliError::Incompatible(format!(
                "incompatible potentials: {} and {} simulate different systems",
                first.dir.display(),
                r.dir.display()
            )));
        }
        if !times_match(r.manifest.final_time, first.manifest.final_time) {
            return Err(CliError::Incompatible(format!(
                "incompatible horizons: {} ends at {} but {} ends at {}",
                first.dir.display(),
                first.manifest.final_time,
                r.dir.display(),
                r.manifest.final_time
            )));
        }
    }

    let t0 = first.table.require("t", &first.dir.join(TRAJECTORY))?;
    let mut row_of: Vec<Vec<usize>> = Vec::with_capacity(runs.len());
    for r in &runs {
        let t = r.table.require("t", &r.dir.join(TRAJECTORY))?;
        row_of.push(
            t0.iter()
                .map(|a| {
                    t.iter()
                        .position(|b| times_match(*a, *b))
                        .unwrap_or(usize::MAX)
                })
                .collect(),
        );
    }
    let common: Vec<usize> = (0..t0.len())
        .filter(|&k| row_of.iter().all(|rows| rows[k] != usize::MAX))
        .collect();

    let mut header = vec!["t".to_string()];
    for i in 1..=runs.len() {
        header.push(format!("epsilon_{i}"));
        header.push(format!("bound_{i}"));
        header.push(format!("true_error_{i}"));
    }
    let truth_at = |r: &Loaded, t: f64| -> Option<f64> {
        let c = r.certificate.as_ref()?;
        let ti = c.column_index("t")?;
        let ei = c.column_index("true_error")?;
        c.rows
            .iter()
            .find(|row| row[ti].is_some_and(|s| times_match(s, t)))
            .and_then(|row| row[ei])
    };
    let mut rows = Vec::with_capacity(common.len());
    for &k in &common {
        let t = t0[k];
        let mut row = vec![fmt(t)];
        for (r, rows_r) in runs.iter().zip(&row_of) {
            let i = rows_r[k];
            let cell = |name: &str| {
                r.table
                    .column_index(name)
                    .and_then(|c| r.table.rows[i][c])
                    .unwrap_or(f64::NAN)
            };
            row.push(fmt(cell("epsilon")));
            row.push(fmt(cell("bound")));
            row.push(truth_at(r, t).map(fmt).unwrap_or_default());
        }
        rows.push(row);
    }

    let coords = |r: &Loaded, prefix: &str, row: usize| -> Vec<f64> {
        columns_matching(&r.table, prefix)
            .into_iter()
            .map(|c| r.table.rows[row][c].unwrap_or(f64::NAN))
            .collect()
    };
    let mut summary = Vec::with_capacity(runs.len());
    for (r, rows_r) in runs.iter().zip(&row_of) {
        let last = r.table.rows.len().saturating_sub(1);
        let bound = r
            .table
            .column_index("bound")
            .and_then(|c| r.table.rows.get(last).and_then(|row| row[c]))
            .unwrap_or(f64::NAN);
        let frozen = r.manifest.kind == Kind::Frozen && first.manifest.kind == Kind::Frozen;
        let delta = |prefix: &str| -> Option<f64> {
            if !frozen {
                return None;
            }
            let mut worst: f64 = 0.0;
            for &k in &common {
                let a = coords(first, prefix, row_of[0][k]);
                let b = coords(r, prefix, rows_r[k]);
                if a.len() != b.len() {
                    return None;
                }
                for (x, y) in a.iter().zip(&b) {
                    worst = worst.max((x - y).abs());
                }
            }
            Some(worst)
        };
        summary.push(CompareRow {
            dir: r.dir.clone(),
            kind: r.manifest.kind,
            principle: r.manifest.principle.to_string(),
            bound,
            true_error: truth_at(r, r.manifest.final_time),
            max_dq: delta("q_"),
            max_dp: delta("p_"),
        });
    }
    let hash = runs
        .iter()
        .map(|r| r.manifest.config_hash.as_str())
        .collect::<Vec<_>>()
        .join(",");
    Ok(Comparison {
        header,
        rows,
        summary,
        hash,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub value: String,
    pub dir: PathBuf,
    pub bound: f64,
    pub true_error: Option<f64>,
}

/// Runs `config` once per value of `param` (in parallel) and compares the runs.
pub fn sweep(
    config: &Path,
    param: &str,
    values: &[String],
    out: &Path,
) -> Result<(Vec<SweepEntry>, Comparison)> {
    if values.is_empty() {
        return Err(CliError::invalid("--values", "needs at least one value"));
    }
    let text = fs::read_to_string(config).at(config)?;
    let doc: toml::Value = toml::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let jobs = values
        .iter()
        .map(|v| {
            let mut d = doc.clone();
            override_value(&mut d, param, v)?;
            let scenario: Scenario = d
                .try_into()
                .map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
            Ok((
                v.clone(),
                scenario,
                out.join(format!("{param}={}", v.trim())),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<Result<(String, RunOutcome)>> = jobs
        .into_par_iter()
        .map(|(v, scenario, dir)| Ok((v, run_scenario(scenario, &dir)?)))
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    let mut dirs = Vec::with_capacity(results.len());
    for r in results {
        let (value, outcome) = r?;
        let report = outcome.certificate.as_ref();
        entries.push(SweepEntry {
            value,
            dir: outcome.dir.clone(),
            bound: report.map(|c| c.bound).unwrap_or(f64::NAN),
            true_error: report.and_then(|c| c.true_error),
        });
        dirs.push(outcome.dir);
    }
    let comparison = compare(&dirs)?;
    let path = out.join("comparison.csv");
    let file = fs::File::create(&path).at(&path)?;
    comparison.write(std::io::BufWriter::new(file)).at(&path)?;
    write_json(
        &out.join("sweep.json"),
        &serde_json::json!({ "param": param, "runs": entries }),
    )?;
    Ok((entries, comparison))
}
