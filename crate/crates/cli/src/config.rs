//! Scenario files: TOML schema, parse-time validation and hashing.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use varqd_core::frozen;
use varqd_core::hartree::{assemble_product, MAX_PARTICLES};
use varqd_core::{
    FrozenParams, GaussianSpec, Grid, GridWavefunction, HamiltonianSpec, HartreeState,
    IntegratorConfig, Method, PotentialModel, Principle,
};

use crate::error::{CliError, IoContext, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Frozen,
    Hartree,
    Reference,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Frozen => "frozen",
            Kind::Hartree => "hartree",
            Kind::Reference => "reference",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    #[serde(default)]
    pub principle: Principle,
    pub system: SystemConfig,
    pub grid: GridConfig,
    pub initial: InitialConfig,
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default = "one")]
    pub hbar: f64,
    pub potential: PotentialConfig,
    /// Per-axis (frozen) or per-particle (Hartree) kinetic factors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinetic_scale: Option<Vec<f64>>,
}

/// Potential grammar: a `type` tag plus that model's coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Harmonic {
        k: f64,
    },
    Quartic {
        k2: f64,
        k4: f64,
    },
    Morse {
        depth: f64,
        a: f64,
        #[serde(default)]
        x0: f64,
    },
    DoubleWell {
        a: f64,
        b: f64,
    },
    Constant {
        #[serde(default)]
        c: f64,
    },
    Linear {
        mu: Vec<f64>,
    },
    /// `λ x_first x_second` (zero-based coordinates).
    Pair {
        lambda: f64,
        #[serde(default)]
        first: usize,
        #[serde(default = "one_usize")]
        second: usize,
    },
    /// One term per coordinate.
    Separable {
        terms: Vec<PotentialConfig>,
    },
    Sum {
        terms: Vec<PotentialConfig>,
    },
}

impl PotentialConfig {
    pub fn to_model(&self) -> PotentialModel {
        match self {
            PotentialConfig::Harmonic { k } => PotentialModel::Harmonic { k: *k },
            PotentialConfig::Quartic { k2, k4 } => PotentialModel::Quartic { k2: *k2, k4: *k4 },
            PotentialConfig::Morse { depth, a, x0 } => PotentialModel::Morse {
                depth: *depth,
                a: *a,
                x0: *x0,
            },
            PotentialConfig::DoubleWell { a, b } => PotentialModel::DoubleWell { a: *a, b: *b },
            PotentialConfig::Constant { c } => PotentialModel::Constant { c: *c },
            PotentialConfig::Linear { mu } => PotentialModel::Linear { mu: mu.clone() },
            PotentialConfig::Pair {
                lambda,
                first,
                second,
            } => PotentialModel::PairProduct {
                lambda: *lambda,
                first: *first,
                second: *second,
            },
            PotentialConfig::Separable { terms } => {
                PotentialModel::SeparableSum(terms.iter().map(Self::to_model).collect())
            }
            PotentialConfig::Sum { terms } => {
                PotentialModel::Sum(terms.iter().map(Self::to_model).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub points: usize,
    /// Spatial dimension of a frozen packet; Hartree grids are one-dimensional.
    #[serde(default = "one_usize")]
    pub dim: usize,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particles: Option<Vec<GaussianSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default)]
    pub method: Method,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Rerun at half the step to estimate the integration error.
    #[serde(default)]
    pub estimate_error: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "one_usize")]
    pub stride: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            stride: 1,
            directory: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    pub dt: f64,
    /// Split steps between snapshots; derived from the output stride if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<usize>,
    #[serde(default)]
    pub estimate_error: bool,
    /// Treat a kinetic phase above π/4 as an error rather than a warning.
    #[serde(default)]
    pub strict: bool,
}

const RK4_STABILITY: f64 = 2.8;

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_max_points() -> usize {
    Grid::DEFAULT_MAX_POINTS
}

/// Initial data in either of the two accepted forms.
#[derive(Debug, Clone)]
pub enum Initial {
    Packet(FrozenParams),
    Product(Vec<GaussianSpec>),
}

/// A validated scenario with its core objects built.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub spec: HamiltonianSpec,
    /// Packet grid (frozen) or the shared one-particle grid (Hartree).
    pub grid: Grid,
    pub initial: Initial,
    pub config_hash: String,
    pub physics_hash: String,
}

impl Prepared {
    /// Configuration-space dimension: `d` for a packet, `N` for a product.
    pub fn dim(&self) -> usize {
        match &self.initial {
            Initial::Packet(p) => p.dim(),
            Initial::Product(specs) => specs.len(),
        }
    }

    pub fn reference_grid(&self) -> Result<Grid> {
        match &self.initial {
            Initial::Packet(_) => Ok(self.grid.clone()),
            Initial::Product(specs) => Ok(Grid::with_budget(
                specs.len(),
                self.grid.length(),
                self.grid.points(),
                self.scenario.grid.max_points,
            )?),
        }
    }

    pub fn hartree_state(&self) -> Result<HartreeState> {
        match &self.initial {
            Initial::Product(specs) => Ok(HartreeState::from_gaussians(
                &self.grid,
                specs,
                self.spec.hbar,
            )?),
            Initial::Packet(_) => Err(CliError::invalid(
                "initial.particles",
                "is required for Hartree runs",
            )),
        }
    }

    pub fn initial_wavefunction(&self) -> Result<GridWavefunction> {
        match &self.initial {
            Initial::Packet(p) => Ok(frozen::synthesize(p, &self.grid)?),
            Initial::Product(_) => Ok(assemble_product(&self.hartree_state()?)?),
        }
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let s = &self.scenario.integrator;
        IntegratorConfig {
            method: s.method,
            dt: s.dt,
            t_final: s.t_final,
            tolerance: s.tolerance,
            store_every: self.scenario.output.stride,
        }
    }

    /// Split steps, step size and snapshot interval of the reference run.
    pub fn reference_schedule(&self) -> Option<(usize, f64, usize)> {
        let sc = &self.scenario;
        let t = sc.integrator.t_final;
        if sc.kind == Kind::Reference {
            let dt = sc.integrator.dt;
            return Some((steps_for(t, dt), dt, sc.output.stride));
        }
        let r = sc.reference.as_ref()?;
        let every = r.sample_interval.unwrap_or_else(|| {
            if sc.integrator.method == Method::Rk4 {
                ratio(sc.output.stride as f64 * sc.integrator.dt, r.dt)
                    .unwrap_or(1)
                    .max(1)
            } else {
                usize::MAX
            }
        });
        Some((steps_for(t, r.dt), r.dt, every))
    }
}

fn steps_for(t: f64, dt: f64) -> usize {
    (t / dt - 1e-9).ceil().max(0.0) as usize
}

/// `a / b` when it is an integer up to `1e-9` relative.
fn ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = r.round();
    ((r - n).abs() <= 1e-9 * n.max(1.0)).then_some(n as usize)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).at(path)?;
        Self::from_toml(&text)
    }

    /// Hash of the canonical JSON form; insensitive to TOML formatting.
    pub fn config_hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("scenario serializes"))
    }

    /// Hash of everything that determines the exact solution.
    pub fn physics_hash(&self) -> String {
        let physics = serde_json::json!({
            "system": self.system,
            "grid": self.grid,
            "initial": self.initial,
            "t_final": self.integrator.t_final,
        });
        sha256_hex(&serde_json::to_vec(&physics).expect("physics block serializes"))
    }

    pub fn prepare(self) -> Result<Prepared> {
        let hbar = self.system.hbar;
        positive("system.hbar", hbar)?;
        positive("grid.length", self.grid.length)?;
        let m = self.grid.points;
        if m < 8 || !m.is_power_of_two() {
            return Err(CliError::invalid(
                "grid.points",
                format!("must be a power of two >= 8, got {m}"),
            ));
        }
        if !(1..=2).contains(&self.grid.dim) {
            return Err(CliError::invalid("grid.dim", "must be 1 or 2"));
        }
        if self.kind == Kind::Hartree && self.grid.dim != 1 {
            return Err(CliError::invalid(
                "grid.dim",
                "must be 1: Hartree grids are per particle",
            ));
        }
        let it = &self.integrator;
        positive("integrator.dt", it.dt)?;
        if !(it.t_final.is_finite() && it.t_final >= 0.0) {
            return Err(CliError::invalid(
                "integrator.t_final",
                "must be nonnegative",
            ));
        }
        if it.method == Method::Rk45 {
            positive("integrator.tolerance", it.tolerance)?;
        }
        if self.output.stride == 0 {
            return Err(CliError::invalid("output.stride", "must be at least 1"));
        }

        let half = 0.5 * self.grid.length;
        let initial = match (&self.initial.delta, &self.initial.particles) {
            (Some(_), Some(_)) => {
                return Err(CliError::invalid(
                    "initial",
                    "give either a packet (delta, q, p) or particles, not both",
                ))
            }
            (None, None) => {
                let field = if self.kind == Kind::Hartree {
                    "initial.particles"
                } else {
                    "initial.delta"
                };
                return Err(CliError::invalid(field, "is required"));
            }
            (&Some(delta), None) => {
                if self.kind == Kind::Hartree {
                    return Err(CliError::invalid(
                        "initial.particles",
                        "is required for Hartree runs",
                    ));
                }
                positive("initial.delta", delta)?;
                let d = self.grid.dim;
                let q = self.initial.q.clone().unwrap_or_else(|| vec![0.0; d]);
                let p = self.initial.p.clone().unwrap_or_else(|| vec![0.0; d]);
                for (name, v) in [("initial.q", &q), ("initial.p", &p)] {
                    if v.len() != d {
                        return Err(CliError::invalid(
                            name,
                            format!("has {} entries but grid.dim is {d}", v.len()),
                        ));
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(CliError::invalid(name, "entries must be finite"));
                    }
                }
                if !self.initial.theta.is_finite() {
                    return Err(CliError::invalid("initial.theta", "must be finite"));
                }
                for &qm in &q {
                    let need = (2.0 * delta * qm).abs() + 5.0 * delta;
                    if need >= half {
                        return Err(CliError::invalid(
                            "initial.q",
                            format!(
                                "packet does not fit the box: |2δq| + 5δ = {need:.4} >= L/2 = {half}"
                            ),
                        ));
                    }
                }
                Initial::Packet(FrozenParams::new(self.initial.theta, q, p, delta, hbar)?)
            }
            (None, Some(specs)) => {
                if self.kind == Kind::Frozen {
                    return Err(CliError::invalid(
                        "initial.delta",
                        "is required for frozen runs",
                    ));
                }
                let max = if self.kind == Kind::Reference {
                    2
                } else {
                    MAX_PARTICLES
                };
                if specs.is_empty() || specs.len() > max {
                    return Err(CliError::invalid(
                        "initial.particles",
                        format!("needs between 1 and {max} entries, got {}", specs.len()),
                    ));
                }
                for (i, s) in specs.iter().enumerate() {
                    positive(&format!("initial.particles[{i}].width"), s.width)?;
                    let need = s.center.abs() + 5.0 * s.width;
                    if !(s.center.is_finite() && need < half) {
                        return Err(CliError::invalid(
                            format!("initial.particles[{i}].center"),
                            format!("particle does not fit the box: |c| + 5w >= L/2 = {half}"),
                        ));
                    }
                    if !(s.momentum.is_finite() && s.phase.is_finite()) {
                        return Err(CliError::invalid(
                            format!("initial.particles[{i}]"),
                            "momentum and phase must be finite",
                        ));
                    }
                }
                Initial::Product(specs.clone())
            }
        };
        let dim = match &initial {
            Initial::Packet(p) => p.dim(),
            Initial::Product(s) => s.len(),
        };

        let model = self.system.potential.to_model();
        model
            .validate(dim)
            .map_err(|e| CliError::invalid("system.potential", e.to_string()))?;
        let mut spec = HamiltonianSpec::new(hbar, model)?;
        if let Some(scale) = &self.system.kinetic_scale {
            if scale.len() != dim {
                return Err(CliError::invalid(
                    "system.kinetic_scale",
                    format!("needs {dim} entries, got {}", scale.len()),
                ));
            }
            spec = spec
                .with_kinetic_scale(scale.clone())
                .map_err(|e| CliError::invalid("system.kinetic_scale", e.to_string()))?;
        }

        let grid = Grid::with_budget(self.grid.dim, self.grid.length, m, self.grid.max_points)
            .map_err(|e| CliError::invalid("grid.max_points", e.to_string()))?;

        // explicit RK4 on the spectral kinetic term: |dt λ_max| must stay inside
        // the stability interval (≈ 2.83 on the imaginary axis)
        if self.kind == Kind::Hartree && it.method == Method::Rk4 {
            let s = (0..dim).map(|n| spec.scale(n)).fold(0.0, f64::max);
            let k = grid.k_max();
            let stiff = it.dt * 0.5 * hbar * s * k * k;
            if stiff > RK4_STABILITY {
                return Err(CliError::invalid(
                    "integrator.dt",
                    format!(
                        "too large for the grid: dt·ħk_max²/2 = {stiff:.3} exceeds the RK4 limit {RK4_STABILITY}"
                    ),
                ));
            }
        }

        let wants_reference = self.kind == Kind::Reference || self.reference.is_some();
        if wants_reference {
            if dim > 2 {
                return Err(CliError::invalid(
                    "reference",
                    "the reference solver supports at most two dimensions",
                ));
            }
            let total = m.checked_pow(dim as u32).unwrap_or(usize::MAX);
            if total > self.grid.max_points {
                return Err(CliError::invalid(
                    "grid.max_points",
                    format!("reference grid needs {total} points"),
                ));
            }
        }
        if self.kind == Kind::Reference && ratio(it.t_final, it.dt).is_none() {
            return Err(CliError::invalid(
                "integrator.dt",
                "must divide integrator.t_final for reference runs",
            ));
        }
        if let Some(r) = &self.reference {
            positive("reference.dt", r.dt)?;
            if r.sample_interval == Some(0) {
                return Err(CliError::invalid(
                    "reference.sample_interval",
                    "must be at least 1",
                ));
            }
            if ratio(it.t_final, r.dt).is_none() {
                return Err(CliError::invalid(
                    "reference.dt",
                    "must divide integrator.t_final",
                ));
            }
            if it.method == Method::Rk4
                && r.sample_interval.is_none()
                && ratio(self.output.stride as f64 * it.dt, r.dt).is_none()
            {
                return Err(CliError::invalid(
                    "reference.dt",
                    "must divide output.stride × integrator.dt so snapshots line up",
                ));
            }
        }

        let config_hash = self.config_hash();
        let physics_hash = self.physics_hash();
        Ok(Prepared {
            scenario: self,
            spec,
            grid,
            initial,
            config_hash,
            physics_hash,
        })
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::invalid(
            field,
            format!("must be positive, got {v}"),
        ))
    }
}

/// Sets `path` (dotted, with optional `[i]` indices) in a parsed TOML document.
pub fn override_value(doc: &mut toml::Value, path: &str, raw: &str) -> Result<()> {
    let bad = |reason: &str| CliError::invalid(path, reason.to_string());
    let mut cur = doc;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        let (key, index) = match seg.find('[') {
            Some(open) if seg.ends_with(']') => {
                let idx: usize = seg[open + 1..seg.len() - 1]
                    .parse()
                    .map_err(|_| bad("has a malformed index"))?;
                (&seg[..open], Some(idx))
            }
            _ => (*seg, None),
        };
        let table = cur
            .as_table_mut()
            .ok_or_else(|| bad("does not name a table"))?;
        if last && index.is_none() {
            let value = parse_like(table.get(key), raw);
            table.insert(key.to_string(), value);
            return Ok(());
        }
        let next = table
            .get_mut(key)
            .ok_or_else(|| bad("does not exist in the config"))?;
        cur = match index {
            Some(idx) => {
                let arr = next.as_array_mut().ok_or_else(|| bad("is not an array"))?;
                let slot = arr.get_mut(idx).ok_or_else(|| bad("index out of range"))?;
                if last {
                    *slot = parse_like(Some(slot), raw);
                    return Ok(());
                }
                slot
            }
            None => next,
        };
    }
    Err(bad("is empty"))
}

fn parse_like(existing: Option<&toml::Value>, raw: &str) -> toml::Value {
    let raw = raw.trim();
    if let Some(toml::Value::Integer(_)) = existing {
        if let Ok(i) = raw.parse::<i64>() {
            return toml::Value::Integer(i);
        }
    }
    if let Ok(b) = raw.parse::<bool>() {
        return toml::Value::Boolean(b);
    }
    match raw.parse::<f64>() {
        Ok(f) => toml::Value::Float(f),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FROZEN: &str = r#"
kind = "frozen"
[system]
hbar = 1.0
potential = { type = "quartic", k2 = 1.0, k4 = 0.1 }
[grid]
length = 20.0
points = 128
[initial]
q = [1.0]
p = [0.5]
delta = 0.7
[integrator]
dt = 0.01
t_final = 1.0
"#;

    fn field_of(err: CliError) -> String {
        match err {
            CliError::Validation { field, .. } => field,
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn parses_and_hashes_stably() {
        let a = Scenario::from_toml(FROZEN).unwrap();
        let b = Scenario::from_toml(&FROZEN.replace("1.0\n", "1\n")).unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
        let p = a.clone().prepare().unwrap();
        assert_eq!(p.dim(), 1);
        let mut c = a.clone();
        c.integrator.dt = 0.02;
        assert_ne!(c.config_hash(), a.config_hash());
        assert_eq!(c.physics_hash(), a.physics_hash());
    }

    #[test]
    fn validation_names_fields() {
        let bad = FROZEN.replace("delta = 0.7", "delta = -1.0");
        let err = Scenario::from_toml(&bad).unwrap().prepare().unwrap_err();
        assert_eq!(field_of(err), "initial.delta");
        let bad = FROZEN.replace("points = 128", "points = 100");
        let err = Scenario::from_toml(&bad).unwrap().prepare().unwrap_err();
        assert_eq!(field_of(err), "grid.points");
        let bad = FROZEN.replace("q = [1.0]", "q = [9.0]");
        let err = Scenario::from_toml(&bad).unwrap().prepare().unwrap_err();
        assert_eq!(field_of(err), "initial.q");
        let bad = FROZEN.replace("dt = 0.01", "dt = 0.0");
        let err = Scenario::from_toml(&bad).unwrap().prepare().unwrap_err();
        assert_eq!(field_of(err), "integrator.dt");
        let bad = format!("{FROZEN}\n[reference]\ndt = 0.003\n");
        let err = Scenario::from_toml(&bad).unwrap().prepare().unwrap_err();
        assert_eq!(field_of(err), "reference.dt");
        assert!(Scenario::from_toml(&FROZEN.replace("k4 = 0.1", "k5 = 0.1")).is_err());
    }

    #[test]
    fn stiff_hartree_step_is_rejected() {
        let text = r#"
kind = "hartree"
[system]
potential = { type = "harmonic", k = 1.0 }
[grid]
length = 16.0
points = 128
[[initial.particles]]
center = 0.0
momentum = 0.0
width = 1.0
[integrator]
dt = 0.01
t_final = 1.0
"#;
        let err = Scenario::from_toml(text).unwrap().prepare().unwrap_err();
        assert_eq!(field_of(err), "integrator.dt");
        let ok = text.replace("dt = 0.01", "dt = 0.005");
        Scenario::from_toml(&ok).unwrap().prepare().unwrap();
    }

    #[test]
    fn reference_schedule_lines_up() {
        let text = FROZEN.replace("t_final = 1.0", "t_final = 1.0\n[output]\nstride = 10");
        let text = format!("{text}\n[reference]\ndt = 0.001\n");
        let p = Scenario::from_toml(&text).unwrap().prepare().unwrap();
        assert_eq!(p.reference_schedule(), Some((1000, 0.001, 100)));
    }

    #[test]
    fn overrides_nested_values() {
        let mut doc: toml::Value = toml::from_str(FROZEN).unwrap();
        override_value(&mut doc, "initial.delta", "0.5").unwrap();
        override_value(&mut doc, "grid.points", "64").unwrap();
        override_value(&mut doc, "initial.q[0]", "0.25").unwrap();
        override_value(&mut doc, "system.potential.k4", "0.2").unwrap();
        let s: Scenario = doc.clone().try_into().unwrap();
        assert_eq!(s.initial.delta, Some(0.5));
        assert_eq!(s.grid.points, 64);
        assert_eq!(s.initial.q, Some(vec![0.25]));
        assert_eq!(
            s.system.potential,
            PotentialConfig::Quartic { k2: 1.0, k4: 0.2 }
        );
        assert!(override_value(&mut doc, "nope.x", "1").is_err());
    }
}
