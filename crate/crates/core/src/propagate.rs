//! Time integration of the variational flows, the accumulated residual bound
//! `B(t) = ∫₀ᵗ ε ds`, and certificates against a reference solution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frozen::{FrozenDerivative, FrozenModel, FrozenParams};
use crate::grid::GridWavefunction;
use crate::hartree::{HartreeDerivative, HartreeModel, HartreeState};

/// A state that can be advanced along a rate: `self += a · rate`.
pub trait OdeState: Clone {
    type Rate: Clone;

    fn add_scaled(&mut self, a: f64, rate: &Self::Rate) -> Result<()>;

    /// Scaled error norm between two candidate states (adaptive stepping).
    fn error_norm(&self, other: &Self, tolerance: f64) -> f64;
}

impl OdeState for FrozenParams {
    type Rate = FrozenDerivative;

    fn add_scaled(&mut self, a: f64, rate: &FrozenDerivative) -> Result<()> {
        if rate.z_dot.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rate.z_dot.len(),
            });
        }
        self.theta += a * rate.theta_dot;
        for (m, z) in rate.z_dot.iter().enumerate() {
            self.q[m] += a * z.re;
            self.p[m] += a * z.im;
        }
        Ok(())
    }

    fn error_norm(&self, other: &Self, tolerance: f64) -> f64 {
        let pairs = std::iter::once((self.theta, other.theta))
            .chain(self.q.iter().copied().zip(other.q.iter().copied()))
            .chain(self.p.iter().copied().zip(other.p.iter().copied()));
        pairs
            .map(|(a, b)| (a - b).abs() / (tolerance * (1.0 + a.abs().max(b.abs()))))
            .fold(0.0, f64::max)
    }
}

impl OdeState for HartreeState {
    type Rate = HartreeDerivative;

    fn add_scaled(&mut self, a: f64, rate: &HartreeDerivative) -> Result<()> {
        if rate.phi_dot.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: rate.phi_dot.len(),
            });
        }
        for (phi, d) in self.particles_mut().iter_mut().zip(&rate.phi_dot) {
            phi.axpy(Complex64::new(a, 0.0), d)?;
        }
        Ok(())
    }

    fn error_norm(&self, other: &Self, tolerance: f64) -> f64 {
        self.particles()
            .iter()
            .zip(other.particles())
            .map(|(a, b)| a.distance(b).unwrap_or(f64::INFINITY) / tolerance)
            .fold(0.0, f64::max)
    }
}

/// Observables recorded at every accepted step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub norm: f64,
    pub energy: f64,
    /// Hartree gauge factor `c1`.
    pub gauge: Option<f64>,
    pub epsilon: f64,
    pub particle_norms: Vec<f64>,
    pub particle_kinetic: Vec<f64>,
}

/// A variational equation of motion together with its diagnostics.
pub trait VariationalFlow {
    type State: OdeState;

    fn rate(&self, state: &Self::State) -> Result<<Self::State as OdeState>::Rate>;

    fn observe(&self, state: &Self::State) -> Result<Observation>;

    /// Projection back onto the manifold after an accepted step; returns the
    /// drift that was removed.
    fn post_step(&self, _state: &mut Self::State) -> Result<f64> {
        Ok(0.0)
    }
}

/// Frozen Gaussian flow; `ε` needs the model to carry a grid.
impl VariationalFlow for FrozenModel {
    type State = FrozenParams;

    fn rate(&self, state: &FrozenParams) -> Result<FrozenDerivative> {
        self.eom(state)
    }

    fn observe(&self, state: &FrozenParams) -> Result<Observation> {
        let energy = self.energy(state)?;
        let (norm, epsilon) = match self.grid() {
            Some(g) => (
                crate::frozen::synthesize(state, g)?.norm(),
                self.epsilon(state)?,
            ),
            None => (1.0, f64::NAN),
        };
        Ok(Observation {
            norm,
            energy,
            gauge: None,
            epsilon,
            particle_norms: Vec::new(),
            particle_kinetic: Vec::new(),
        })
    }
}

/// Hartree flow with optional renormalization after each step.
#[derive(Debug, Clone)]
pub struct HartreeFlow {
    pub model: HartreeModel,
    /// Drift above which factors are rescaled; `None` disables renormalization.
    pub renormalize_above: Option<f64>,
}

impl HartreeFlow {
    pub fn new(model: HartreeModel) -> Self {
        HartreeFlow {
            model,
            renormalize_above: Some(1e-12),
        }
    }

    pub fn without_renormalization(model: HartreeModel) -> Self {
        HartreeFlow {
            model,
            renormalize_above: None,
        }
    }
}

impl VariationalFlow for HartreeFlow {
    type State = HartreeState;

    fn rate(&self, state: &HartreeState) -> Result<HartreeDerivative> {
        self.model.eom(state)
    }

    fn observe(&self, state: &HartreeState) -> Result<Observation> {
        let d = self.model.eom(state)?;
        let en = self.model.energies(state)?;
        let particle_norms = state.norms();
        Ok(Observation {
            norm: particle_norms.iter().product(),
            energy: en.e0,
            gauge: Some(d.c1),
            epsilon: self.model.epsilon(state)?,
            particle_norms,
            particle_kinetic: en.kinetic,
        })
    }

    fn post_step(&self, state: &mut HartreeState) -> Result<f64> {
        let drift = state
            .norms()
            .iter()
            .map(|n| (n - 1.0).abs())
            .fold(0.0, f64::max);
        match self.renormalize_above {
            Some(threshold) if drift > threshold => {
                log::debug!("renormalizing Hartree factors, drift {drift:.3e}");
                state.renormalize();
                Ok(drift)
            }
            _ => Ok(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Classic fourth-order Runge–Kutta with fixed step.
    #[default]
    Rk4,
    /// Dormand–Prince 5(4) with step-size control.
    Rk45,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step (RK4) or initial step (RK45).
    pub dt: f64,
    pub t_final: f64,
    /// Relative tolerance for RK45.
    pub tolerance: f64,
    /// Keep every `store_every`-th state (the final state is always kept).
    pub store_every: usize,
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_final: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            dt,
            t_final,
            tolerance: 1e-8,
            store_every: 1,
        }
    }

    pub fn rk45(dt: f64, t_final: f64, tolerance: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45,
            dt,
            t_final,
            tolerance,
            store_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("integrator.dt", "must be positive"));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::param("integrator.t_final", "must be nonnegative"));
        }
        if self.method == Method::Rk45 && !(self.tolerance > 0.0) {
            return Err(Error::param("integrator.tolerance", "must be positive"));
        }
        if self.store_every == 0 {
            return Err(Error::param("output.stride", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_dt: f64,
    pub max_dt: f64,
    /// Largest norm drift removed by renormalization.
    pub max_renormalization: f64,
}

/// Time series of one variational run.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord<S> {
    pub times: Vec<f64>,
    pub observations: Vec<Observation>,
    /// Accumulated bound `B(t_k)`.
    pub bound: Vec<f64>,
    /// `(index into times, state)` for the stored states.
    pub states: Vec<(usize, S)>,
    pub stats: IntegratorStats,
}

impl<S> TrajectoryRecord<S> {
    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn final_bound(&self) -> f64 {
        *self.bound.last().unwrap_or(&0.0)
    }

    pub fn final_state(&self) -> Option<&S> {
        self.states.last().map(|(_, s)| s)
    }

    pub fn epsilon(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.epsilon).collect()
    }

    /// Stored state at time `t`, matched within `1e-9 · max(1, t)`.
    pub fn state_at(&self, t: f64) -> Option<&S> {
        self.states
            .iter()
            .find(|(i, _)| times_match(self.times[*i], t))
            .map(|(_, s)| s)
    }

    /// Largest `|E0(t) - E0(0)|`.
    pub fn energy_drift(&self) -> f64 {
        drift(self.observations.iter().map(|o| o.energy))
    }

    /// Largest `|‖u(t)‖ - ‖u(0)‖|`.
    pub fn norm_drift(&self) -> f64 {
        drift(self.observations.iter().map(|o| o.norm))
    }
}

fn drift(mut values: impl Iterator<Item = f64>) -> f64 {
    let Some(first) = values.next() else {
        return 0.0;
    };
    values.map(|v| (v - first).abs()).fold(0.0, f64::max)
}

/// Time equality up to `1e-9` relative.
pub fn times_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

struct Recorder<S> {
    record: TrajectoryRecord<S>,
    store_every: usize,
    steps: usize,
}

impl<S: Clone> Recorder<S> {
    fn push(&mut self, t: f64, state: &S, obs: Observation, last: bool) -> Result<()> {
        if !(obs.epsilon >= 0.0) && !obs.epsilon.is_nan() {
            return Err(Error::Accuracy(format!(
                "negative residual {}",
                obs.epsilon
            )));
        }
        let b = match (self.record.times.last(), self.record.observations.last()) {
            (Some(&t0), Some(prev)) => {
                let inc = 0.5 * (t - t0) * (prev.epsilon + obs.epsilon);
                self.record.bound.last().unwrap() + if inc.is_nan() { 0.0 } else { inc }
            }
            _ => 0.0,
        };
        let idx = self.record.times.len();
        self.record.times.push(t);
        self.record.bound.push(b);
        self.record.observations.push(obs);
        if self.steps.is_multiple_of(self.store_every) || last {
            self.record.states.push((idx, state.clone()));
        }
        self.steps += 1;
        Ok(())
    }
}

/// Integrates `flow` from `state0` over `[0, T]`, recording observables and `B(t)`.
pub fn integrate<F: VariationalFlow>(
    flow: &F,
    state0: F::State,
    config: &IntegratorConfig,
) -> Result<TrajectoryRecord<F::State>> {
    config.validate()?;
    let mut rec = Recorder {
        record: TrajectoryRecord {
            times: Vec::new(),
            observations: Vec::new(),
            bound: Vec::new(),
            states: Vec::new(),
            stats: IntegratorStats {
                min_dt: f64::INFINITY,
                ..Default::default()
            },
        },
        store_every: config.store_every,
        steps: 0,
    };
    let t_final = config.t_final;
    let mut state = state0;
    let obs = flow.observe(&state)?;
    rec.push(0.0, &state, obs, t_final == 0.0)?;
    if t_final == 0.0 {
        rec.record.stats.min_dt = 0.0;
        return Ok(rec.record);
    }
    match config.method {
        Method::Rk4 => {
            let n = ((t_final / config.dt) - 1e-9).ceil().max(1.0) as usize;
            for k in 0..n {
                let t0 = k as f64 * config.dt;
                let t1 = if k + 1 == n {
                    t_final
                } else {
                    (k + 1) as f64 * config.dt
                };
                let h = t1 - t0;
                state = rk4_step(flow, &state, h)?;
                accept(flow, &mut rec, &mut state, t1, h, k + 1 == n)?;
            }
        }
        Method::Rk45 => {
            let mut t = 0.0;
            let mut h = config.dt.min(t_final);
            while t < t_final && !times_match(t, t_final) {
                let last = t + h >= t_final || times_match(t + h, t_final);
                if last {
                    h = t_final - t;
                }
                let (y5, y4) = dopri_step(flow, &state, h)?;
                let err = y5.error_norm(&y4, config.tolerance);
                if err <= 1.0 {
                    t = if last { t_final } else { t + h };
                    state = y5;
                    accept(flow, &mut rec, &mut state, t, h, last)?;
                } else {
                    rec.record.stats.rejected += 1;
                }
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow { t, dt: h });
                }
            }
        }
    }
    Ok(rec.record)
}

fn accept<F: VariationalFlow>(
    flow: &F,
    rec: &mut Recorder<F::State>,
    state: &mut F::State,
    t: f64,
    h: f64,
    last: bool,
) -> Result<()> {
    let removed = flow.post_step(state)?;
    let stats = &mut rec.record.stats;
    stats.accepted += 1;
    stats.min_dt = stats.min_dt.min(h);
    stats.max_dt = stats.max_dt.max(h);
    stats.max_renormalization = stats.max_renormalization.max(removed);
    let obs = flow.observe(state)?;
    rec.push(t, state, obs, last)
}

fn stage<S: OdeState>(y: &S, terms: &[(f64, &S::Rate)]) -> Result<S> {
    let mut s = y.clone();
    for (a, k) in terms {
        if *a != 0.0 {
            s.add_scaled(*a, k)?;
        }
    }
    Ok(s)
}

/// One classic Runge–Kutta step.
pub fn rk4_step<F: VariationalFlow>(flow: &F, y: &F::State, h: f64) -> Result<F::State> {
    let k1 = flow.rate(y)?;
    let k2 = flow.rate(&stage(y, &[(0.5 * h, &k1)])?)?;
    let k3 = flow.rate(&stage(y, &[(0.5 * h, &k2)])?)?;
    let k4 = flow.rate(&stage(y, &[(h, &k3)])?)?;
    stage(
        y,
        &[
            (h / 6.0, &k1),
            (h / 3.0, &k2),
            (h / 3.0, &k3),
            (h / 6.0, &k4),
        ],
    )
}

/// One Dormand–Prince step; returns the fifth- and fourth-order solutions.
fn dopri_step<F: VariationalFlow>(flow: &F, y: &F::State, h: f64) -> Result<(F::State, F::State)> {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut k = vec![flow.rate(y)?];
    for row in A.iter() {
        let terms: Vec<(f64, &_)> = row.iter().zip(&k).map(|(a, ki)| (h * a, ki)).collect();
        let s = stage(y, &terms)?;
        k.push(flow.rate(&s)?);
    }
    let y5 = stage(
        y,
        &A[5]
            .iter()
            .zip(&k)
            .map(|(a, ki)| (h * a, ki))
            .collect::<Vec<_>>(),
    )?;
    let y4 = stage(
        y,
        &B4.iter()
            .zip(&k)
            .map(|(b, ki)| (h * b, ki))
            .collect::<Vec<_>>(),
    )?;
    Ok((y5, y4))
}

/// Discretization slack `c_int dt⁴ t + c_ref dt_ref² t + tail`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SlackModel {
    pub c_int: f64,
    pub dt: f64,
    pub c_ref: f64,
    pub dt_ref: f64,
    /// Spectral tail of the reference state.
    pub tail: f64,
}

impl SlackModel {
    pub fn at(&self, t: f64) -> f64 {
        self.c_int * self.dt.powi(4) * t + self.c_ref * self.dt_ref.powi(2) * t + self.tail
    }

    /// Constant of an order-`p` method from the gap between step `dt` and `dt/2`
    /// runs at time `t` (Richardson: the coarse error is `gap · 2^p/(2^p - 1)`).
    pub fn constant_from_halving(gap: f64, dt: f64, t: f64, order: i32) -> f64 {
        if t <= 0.0 || dt <= 0.0 {
            return 0.0;
        }
        let r = 2f64.powi(order);
        gap * r / (r - 1.0) / (dt.powi(order) * t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSample {
    pub t: f64,
    pub epsilon: f64,
    pub bound: f64,
    pub true_error: Option<f64>,
    pub slack: Option<f64>,
    /// `B(t) - e(t)`.
    pub margin: Option<f64>,
}

/// Summary of `‖u(t) - ψ(t)‖ ≤ ∫₀ᵗ ε ds` along one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub final_time: f64,
    pub bound: f64,
    pub true_error: Option<f64>,
    pub margin: Option<f64>,
    pub epsilon_max: f64,
    pub epsilon_mean: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub steps: usize,
    pub slack: Option<SlackModel>,
    /// True when some `e(t) > B(t) + slack(t)`.
    pub violated: bool,
    pub samples: Vec<CertificateSample>,
}

/// Builds the certificate; `truth` holds `(t, ‖u(t) - ψ(t)‖)` at trajectory times.
pub fn certify<S>(
    traj: &TrajectoryRecord<S>,
    truth: Option<&[(f64, f64)]>,
    slack: Option<SlackModel>,
) -> Result<CertificateReport> {
    certify_series(
        &traj.times,
        &traj.epsilon(),
        &traj.bound,
        &traj.stats,
        truth,
        slack,
    )
}

/// As [`certify`], from the bare series (e.g. read back from disk).
pub fn certify_series(
    times: &[f64],
    eps: &[f64],
    bound: &[f64],
    stats: &IntegratorStats,
    truth: Option<&[(f64, f64)]>,
    slack: Option<SlackModel>,
) -> Result<CertificateReport> {
    if times.is_empty() || eps.len() != times.len() || bound.len() != times.len() {
        return Err(Error::TimeGridMismatch("empty or ragged series".into()));
    }
    let n = eps.len();
    let mut samples: Vec<CertificateSample> = times
        .iter()
        .zip(eps)
        .zip(bound)
        .map(|((&t, &e), &b)| CertificateSample {
            t,
            epsilon: e,
            bound: b,
            true_error: None,
            slack: None,
            margin: None,
        })
        .collect();
    let mut violated = false;
    if let Some(truth) = truth {
        let mut cursor = 0;
        for &(t, e) in truth {
            while cursor < n && !times_match(times[cursor], t) && times[cursor] < t {
                cursor += 1;
            }
            if cursor >= n || !times_match(times[cursor], t) {
                return Err(Error::TimeGridMismatch(format!(
                    "reference time {t} is not a trajectory time"
                )));
            }
            let s = &mut samples[cursor];
            let sl = slack.map(|m| m.at(t)).unwrap_or(0.0);
            s.true_error = Some(e);
            s.slack = Some(sl);
            s.margin = Some(s.bound - e);
            if e > s.bound + sl {
                violated = true;
            }
        }
    }
    let last = samples.last().unwrap();
    let true_error = truth.and(last.true_error);
    let finite: Vec<f64> = eps.iter().copied().filter(|e| e.is_finite()).collect();
    Ok(CertificateReport {
        final_time: last.t,
        bound: last.bound,
        true_error,
        margin: true_error.map(|e| last.bound - e),
        epsilon_max: finite.iter().copied().fold(0.0, f64::max),
        epsilon_mean: if finite.is_empty() {
            0.0
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        },
        dt_min: stats.min_dt,
        dt_max: stats.max_dt,
        steps: stats.accepted,
        slack,
        violated,
        samples,
    })
}

/// `‖u(t) - ψ(t)‖` at every stored trajectory state that has a reference snapshot.
pub fn true_error_series<S>(
    traj: &TrajectoryRecord<S>,
    run: &crate::reference::ReferenceRun,
    synthesize: impl Fn(&S) -> Result<GridWavefunction>,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (i, s) in &traj.states {
        let t = traj.times[*i];
        if run.has_snapshot(t) {
            let u = synthesize(s)?;
            out.push((t, crate::reference::true_error(&u, run, t)?));
        }
    }
    if out.is_empty() {
        return Err(Error::TimeGridMismatch(
            "no stored state coincides with a reference snapshot".into(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frozen::Principle;
    use crate::grid::Grid;
    use crate::operators::{matched_width, HamiltonianSpec, PotentialModel};

    fn oscillator() -> (FrozenModel, FrozenParams) {
        let spec = HamiltonianSpec::new(1.0, PotentialModel::Harmonic { k: 1.0 }).unwrap();
        let delta = matched_width(1.0, 1.0).unwrap();
        let model = FrozenModel::new(&spec, Principle::Mvp).unwrap();
        let p = FrozenParams::new(0.0, vec![1.0], vec![0.5], delta, 1.0).unwrap();
        (model, p)
    }

    #[test]
    fn zero_horizon() {
        let (model, p) = oscillator();
        let rec = integrate(&model, p, &IntegratorConfig::rk4(0.1, 0.0)).unwrap();
        assert_eq!(rec.times, vec![0.0]);
        assert_eq!(rec.bound, vec![0.0]);
        assert_eq!(rec.states.len(), 1);
    }

    #[test]
    fn oscillator_closes_orbit() {
        let (model, p) = oscillator();
        let t = 2.0 * std::f64::consts::PI;
        let rec = integrate(&model, p.clone(), &IntegratorConfig::rk4(1e-3, t)).unwrap();
        let end = rec.final_state().unwrap();
        assert!((rec.final_time() - t).abs() < 1e-15);
        assert!((end.q[0] - p.q[0]).abs() < 1e-8);
        assert!((end.p[0] - p.p[0]).abs() < 1e-8);
        assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn adaptive_matches_fixed_step() {
        let spec = HamiltonianSpec::new(1.0, PotentialModel::Quartic { k2: 1.0, k4: 0.1 }).unwrap();
        let model = FrozenModel::new(&spec, Principle::Mvp).unwrap();
        let p = FrozenParams::new(0.0, vec![1.0], vec![0.5], 0.8, 1.0).unwrap();
        let a = integrate(&model, p.clone(), &IntegratorConfig::rk4(1e-3, 3.0)).unwrap();
        let b = integrate(&model, p, &IntegratorConfig::rk45(0.1, 3.0, 1e-10)).unwrap();
        let (x, y) = (a.final_state().unwrap(), b.final_state().unwrap());
        assert!((x.q[0] - y.q[0]).abs() < 1e-7);
        assert!((x.p[0] - y.p[0]).abs() < 1e-7);
        assert!((x.theta - y.theta).abs() < 1e-7);
        assert!((b.final_time() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn bound_is_trapezoidal_and_monotone() {
        let spec = HamiltonianSpec::new(1.0, PotentialModel::Quartic { k2: 1.0, k4: 0.1 }).unwrap();
        let g = Grid::new(1, 30.0, 256).unwrap();
        let model = FrozenModel::on_grid(&spec, Principle::Mvp, &g).unwrap();
        let p = FrozenParams::new(0.0, vec![0.5], vec![0.2], 0.8, 1.0).unwrap();
        let rec = integrate(&model, p, &IntegratorConfig::rk4(0.05, 1.0)).unwrap();
        assert!(rec.bound.windows(2).all(|w| w[1] >= w[0]));
        let eps = rec.epsilon();
        let mut b = 0.0;
        for k in 1..eps.len() {
            b += 0.5 * (rec.times[k] - rec.times[k - 1]) * (eps[k] + eps[k - 1]);
        }
        assert!((b - rec.final_bound()).abs() < 1e-14);
        let cert = certify(&rec, None, None).unwrap();
        assert!(cert.true_error.is_none() && cert.margin.is_none());
        assert!(!cert.violated);
    }

    #[test]
    fn certify_rejects_foreign_times() {
        let (model, p) = oscillator();
        let rec = integrate(&model, p, &IntegratorConfig::rk4(0.1, 1.0)).unwrap();
        assert!(matches!(
            certify(&rec, Some(&[(0.55, 0.0)]), None),
            Err(Error::TimeGridMismatch(_))
        ));
        let ok = certify(&rec, Some(&[(0.5, 0.0), (1.0, 0.0)]), None).unwrap();
        assert_eq!(ok.true_error, Some(0.0));
    }

    #[test]
    fn halving_constant() {
        // coarse error 16, fine error 1 at dt = 1, t = 1: gap 15 → constant 16
        assert!((SlackModel::constant_from_halving(15.0, 1.0, 1.0, 4) - 16.0).abs() < 1e-12);
    }
}
