//! Frozen Gaussian wave packets
//! `u(x) = (2πδ²)^{-d/4} exp(iθ - |x - 2δq|²/(4δ²) + (i/δ) p·(x - δq))`
//! and their variational equations of motion.
//!
//! With the ladder operators `A = x/(2δ) + δ∇` the packet satisfies `A u = z u`
//! for `z = q + ip`, and the flow reads `ħż = i⟨u|[H, A]u⟩`,
//! `θ̇ = p·q̇ - q·ṗ - E0/ħ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inner, Grid, GridWavefunction, Spectral};
use crate::operators::{GridHamiltonian, HamiltonianSpec};
use crate::tangent::TangentBasis;

/// Tolerated deviation of the synthesized packet's quadrature norm from 1.
const NORM_TOLERANCE: f64 = 1e-4;
/// Radicands below `-RADICAND_TOLERANCE · scale` are reported as errors.
const RADICAND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Principle {
    /// McLachlan: metric-orthogonal residual.
    #[default]
    Mvp,
    /// Kramer–Saraceno: symplectic-orthogonal residual.
    Tdvp,
}

impl std::fmt::Display for Principle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Principle::Mvp => "mvp",
            Principle::Tdvp => "tdvp",
        })
    }
}

/// A point `(θ, q, p)` on the frozen Gaussian manifold of width `δ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrozenParams {
    pub theta: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub delta: f64,
    pub hbar: f64,
}

impl FrozenParams {
    pub fn new(theta: f64, q: Vec<f64>, p: Vec<f64>, delta: f64, hbar: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::param("delta", "must be positive"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::param("hbar", "must be positive"));
        }
        if q.is_empty() {
            return Err(Error::param("q", "dimension must be at least 1"));
        }
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                found: p.len(),
            });
        }
        if !theta.is_finite() || q.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::param("initial", "parameters must be finite"));
        }
        Ok(FrozenParams {
            theta,
            q,
            p,
            delta,
            hbar,
        })
    }

    pub fn from_z(theta: f64, z: &[Complex64], delta: f64, hbar: f64) -> Result<Self> {
        Self::new(
            theta,
            z.iter().map(|c| c.re).collect(),
            z.iter().map(|c| c.im).collect(),
            delta,
            hbar,
        )
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn z(&self) -> Vec<Complex64> {
        self.q
            .iter()
            .zip(&self.p)
            .map(|(&q, &p)| Complex64::new(q, p))
            .collect()
    }

    /// Physical center `2δq`.
    pub fn center(&self) -> Vec<f64> {
        self.q.iter().map(|q| 2.0 * self.delta * q).collect()
    }

    /// Mean momentum `ħp/δ`.
    pub fn mean_momentum(&self) -> Vec<f64> {
        self.p.iter().map(|p| self.hbar * p / self.delta).collect()
    }

    pub fn value_at(&self, x: &[f64]) -> Complex64 {
        let d = self.delta;
        let norm = (2.0 * PI * d * d).powf(-(self.dim() as f64) / 4.0);
        let mut re = 0.0;
        let mut im = self.theta;
        for m in 0..self.dim() {
            let y = x[m] - 2.0 * d * self.q[m];
            re -= y * y / (4.0 * d * d);
            im += self.p[m] * (x[m] - d * self.q[m]) / d;
        }
        Complex64::new(re, im).exp() * norm
    }

    /// Requires `|2δq_m| + 5δ < L/2` on every axis.
    pub fn check_support(&self, grid: &Grid) -> Result<()> {
        let half = 0.5 * grid.length();
        for (axis, c) in self.center().iter().enumerate() {
            let required = c.abs() + 5.0 * self.delta;
            if required >= half {
                return Err(Error::SupportViolation {
                    axis,
                    required,
                    half_box: half,
                });
            }
        }
        Ok(())
    }
}

/// `(θ̇, ż)`; `gauge_convention` marks a phase rate fixed by convention (TDVP).
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenDerivative {
    pub theta_dot: f64,
    pub z_dot: Vec<Complex64>,
    pub gauge_convention: bool,
}

impl FrozenDerivative {
    pub fn q_dot(&self) -> Vec<f64> {
        self.z_dot.iter().map(|z| z.re).collect()
    }

    pub fn p_dot(&self) -> Vec<f64> {
        self.z_dot.iter().map(|z| z.im).collect()
    }

    /// Coefficients of `u̇` in the basis `{iu, i x_m u, (x_m - 2δq_m) u}`.
    pub fn tangent_coefficients(&self, params: &FrozenParams) -> Vec<f64> {
        let d = self.z_dot.len();
        let (qd, pd) = (self.q_dot(), self.p_dot());
        let mut c = Vec::with_capacity(2 * d + 1);
        c.push(self.theta_dot - dot(&pd, &params.q) - dot(&params.p, &qd));
        c.extend(pd.iter().map(|v| v / params.delta));
        c.extend(qd.iter().map(|v| v / params.delta));
        c
    }

    /// Inverse of [`FrozenDerivative::tangent_coefficients`].
    pub fn from_tangent_coefficients(params: &FrozenParams, c: &[f64]) -> Result<Self> {
        let d = params.dim();
        if c.len() != 2 * d + 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * d + 1,
                found: c.len(),
            });
        }
        let pd: Vec<f64> = c[1..=d].iter().map(|v| v * params.delta).collect();
        let qd: Vec<f64> = c[d + 1..].iter().map(|v| v * params.delta).collect();
        let theta_dot = c[0] + dot(&pd, &params.q) + dot(&params.p, &qd);
        Ok(FrozenDerivative {
            theta_dot,
            z_dot: qd
                .iter()
                .zip(&pd)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
            gauge_convention: false,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Samples the packet on `grid`; logs a warning when the packet touches the boundary.
pub fn synthesize(params: &FrozenParams, grid: &Grid) -> Result<GridWavefunction> {
    if params.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: params.dim(),
        });
    }
    if let Err(e) = params.check_support(grid) {
        log::warn!("{e}");
    }
    Ok(GridWavefunction::from_fn(grid, |x| params.value_at(x)))
}

/// `{iu, i x_1 u, …, i x_d u, (x_1 - 2δq_1) u, …}` on `grid`.
pub fn tangent_basis(params: &FrozenParams, grid: &Grid) -> Result<TangentBasis> {
    let u = synthesize(params, grid)?;
    let d = params.dim();
    let mut vectors = vec![u.times_i()];
    let mut labels = vec!["i u".to_string()];
    for m in 0..d {
        vectors.push(u.times_coordinate(m).times_i());
        labels.push(format!("i x_{} u", m + 1));
    }
    for m in 0..d {
        let mut v = u.times_coordinate(m);
        v.axpy((-2.0 * params.delta * params.q[m]).into(), &u)?;
        vectors.push(v);
        labels.push(format!("(x_{0} - 2δq_{0}) u", m + 1));
    }
    TangentBasis::new(vectors, labels)
}

/// `A_m u = (x_m/(2δ) + δ∂_m) u`, derivative taken spectrally.
pub fn lowering(
    u: &GridWavefunction,
    delta: f64,
    axis: usize,
    spectral: &Spectral,
) -> Result<GridWavefunction> {
    let mut out = u.times_coordinate(axis).scaled((0.5 / delta).into());
    out.axpy(delta.into(), &spectral.derivative(u, axis)?)?;
    Ok(out)
}

/// `A_m† u = (x_m/(2δ) - δ∂_m) u`.
pub fn raising(
    u: &GridWavefunction,
    delta: f64,
    axis: usize,
    spectral: &Spectral,
) -> Result<GridWavefunction> {
    let mut out = u.times_coordinate(axis).scaled((0.5 / delta).into());
    out.axpy((-delta).into(), &spectral.derivative(u, axis)?)?;
    Ok(out)
}

/// How the commutator expectation `⟨u|[H, A]u⟩` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EomPath {
    /// Closed-form Gaussian moments of `V` and `∇V`.
    Analytic,
    /// `2q E0 - (1/δ)⟨xu|Hu⟩` by quadrature on the grid.
    Commutator,
}

/// The three evaluations of the local residual `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonReport {
    /// `(‖(H - E0)u‖² - ħ²|ż|²)^{1/2} / ħ`
    pub local: f64,
    /// `(‖Hu‖²/ħ² - ‖u̇‖²)^{1/2}`
    pub energy_norm: f64,
    /// `‖u̇ - Hu/(iħ)‖`
    pub direct: f64,
}

/// Energy fluctuation of the variational Hamiltonian, `‖(H_u - E0)u‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationReport {
    /// `ħ|ż|`
    pub closed_form: f64,
    /// Norm of `Σ_m [w_m (A_m† - z̄_m) + w̄_m (A_m - z_m)] u`, `w = iħż`, on the grid.
    pub assembled: f64,
    /// `‖(H - E0)u‖` on the grid.
    pub exact: f64,
}

/// Frozen Gaussian dynamics for one Hamiltonian and principle.
#[derive(Debug, Clone)]
pub struct FrozenModel {
    spec: HamiltonianSpec,
    principle: Principle,
    grid: Option<GridHamiltonian>,
    path: EomPath,
}

impl FrozenModel {
    /// Analytic model without a grid; needs a potential with closed-form moments.
    pub fn new(spec: &HamiltonianSpec, principle: Principle) -> Result<Self> {
        if spec.potential.product_terms(1).is_none() {
            return Err(Error::Unsupported(
                "tabulated potentials need a grid for frozen dynamics".into(),
            ));
        }
        Ok(FrozenModel {
            spec: spec.clone(),
            principle,
            grid: None,
            path: EomPath::Analytic,
        })
    }

    /// Model with a grid for residuals; the analytic path is used when available.
    pub fn on_grid(spec: &HamiltonianSpec, principle: Principle, grid: &Grid) -> Result<Self> {
        let gh = GridHamiltonian::new(spec, grid)?;
        let path = if spec.potential.product_terms(grid.dim()).is_some() {
            EomPath::Analytic
        } else {
            EomPath::Commutator
        };
        Ok(FrozenModel {
            spec: spec.clone(),
            principle,
            grid: Some(gh),
            path,
        })
    }

    pub fn with_path(mut self, path: EomPath) -> Result<Self> {
        if path == EomPath::Commutator && self.grid.is_none() {
            return Err(Error::Unsupported("commutator path needs a grid".into()));
        }
        self.path = path;
        Ok(self)
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn principle(&self) -> Principle {
        self.principle
    }

    pub fn path(&self) -> EomPath {
        self.path
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_ref().map(|g| g.grid())
    }

    fn grid_hamiltonian(&self) -> Result<&GridHamiltonian> {
        self.grid
            .as_ref()
            .ok_or_else(|| Error::Unsupported("grid residuals need a grid".into()))
    }

    fn check(&self, params: &FrozenParams) -> Result<()> {
        if (params.hbar - self.spec.hbar).abs() > 1e-15 * self.spec.hbar {
            return Err(Error::param("hbar", "packet and Hamiltonian disagree"));
        }
        self.spec.potential.validate(params.dim())
    }

    /// Packet and `Hu` on the grid, with the quadrature norm checked.
    fn on_grid_state(&self, params: &FrozenParams) -> Result<(GridWavefunction, GridWavefunction)> {
        let gh = self.grid_hamiltonian()?;
        let u = synthesize(params, gh.grid())?;
        let drift = (u.norm_sqr() - 1.0).abs();
        if drift > NORM_TOLERANCE {
            return Err(Error::Accuracy(format!(
                "packet norm on the grid deviates from 1 by {drift:.3e}"
            )));
        }
        let hu = gh.apply(&u)?;
        Ok((u, hu))
    }

    /// `E0 = ⟨u|Hu⟩`.
    pub fn energy(&self, params: &FrozenParams) -> Result<f64> {
        self.check(params)?;
        match self.path {
            EomPath::Analytic => self.analytic_energy(params),
            EomPath::Commutator => {
                let (u, hu) = self.on_grid_state(params)?;
                Ok(inner(&u, &hu)?.re)
            }
        }
    }

    fn analytic_moments(&self, params: &FrozenParams) -> Result<(f64, Vec<f64>)> {
        self.spec
            .potential
            .gaussian_moments(&params.center(), params.delta)
            .ok_or_else(|| Error::Unsupported("no closed-form moments".into()))
    }

    fn analytic_energy(&self, params: &FrozenParams) -> Result<f64> {
        let (v, _) = self.analytic_moments(params)?;
        let d2 = params.delta * params.delta;
        let h2 = params.hbar * params.hbar;
        let kinetic: f64 = params
            .p
            .iter()
            .enumerate()
            .map(|(m, p)| self.spec.scale(m) * h2 * (p * p + 0.25) / (2.0 * d2))
            .sum();
        Ok(kinetic + v)
    }

    /// Commutator expectation `C = ⟨u|[H, A]u⟩` and `E0`.
    pub fn commutator(&self, params: &FrozenParams) -> Result<(Vec<Complex64>, f64)> {
        self.check(params)?;
        let (hbar, delta) = (params.hbar, params.delta);
        match self.path {
            EomPath::Analytic => {
                let e0 = self.analytic_energy(params)?;
                let (_, grad) = self.analytic_moments(params)?;
                // [H, A] = -(ħ² s/(2δ)) ∂ - δ ∂V and ⟨u|∂u⟩ = i p/δ.
                let c = (0..params.dim())
                    .map(|m| {
                        Complex64::new(
                            -delta * grad[m],
                            -self.spec.scale(m) * hbar * hbar * params.p[m] / (2.0 * delta * delta),
                        )
                    })
                    .collect();
                Ok((c, e0))
            }
            EomPath::Commutator => {
                let (u, hu) = self.on_grid_state(params)?;
                let e0 = inner(&u, &hu)?.re;
                let c = (0..params.dim())
                    .map(|m| {
                        let xhu = inner(&u.times_coordinate(m), &hu)?;
                        Ok(2.0 * params.q[m] * e0 - xhu / delta)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((c, e0))
            }
        }
    }

    /// Variational equations of motion `(θ̇, ż)`.
    pub fn eom(&self, params: &FrozenParams) -> Result<FrozenDerivative> {
        let (c, e0) = self.commutator(params)?;
        let hbar = params.hbar;
        let z_dot: Vec<Complex64> = c.iter().map(|c| Complex64::i() * c / hbar).collect();
        let qd: Vec<f64> = z_dot.iter().map(|z| z.re).collect();
        let pd: Vec<f64> = z_dot.iter().map(|z| z.im).collect();
        let theta_dot = dot(&params.p, &qd) - dot(&params.q, &pd) - e0 / hbar;
        if !theta_dot.is_finite() || z_dot.iter().any(|z| !z.is_finite()) {
            return Err(Error::Accuracy("non-finite equations of motion".into()));
        }
        Ok(FrozenDerivative {
            theta_dot,
            z_dot,
            gauge_convention: self.principle == Principle::Tdvp,
        })
    }

    /// `u̇` assembled on the grid from `(θ̇, ż)`.
    pub fn velocity(
        &self,
        params: &FrozenParams,
        der: &FrozenDerivative,
    ) -> Result<GridWavefunction> {
        let basis = tangent_basis(params, self.grid_hamiltonian()?.grid())?;
        basis.combine(&der.tangent_coefficients(params))
    }

    pub fn epsilon(&self, params: &FrozenParams) -> Result<f64> {
        Ok(self.epsilon_report(params)?.local)
    }

    /// All three evaluations of `ε`.
    pub fn epsilon_report(&self, params: &FrozenParams) -> Result<EpsilonReport> {
        let (u, hu) = self.on_grid_state(params)?;
        let der = self.eom(params)?;
        let hbar = params.hbar;
        let e0 = inner(&u, &hu)?.re;
        let mut centered = hu.clone();
        centered.axpy((-e0).into(), &u)?;
        let zd2: f64 = der.z_dot.iter().map(|z| z.norm_sqr()).sum();
        let local = checked_sqrt(
            (centered.norm_sqr() - hbar * hbar * zd2) / (hbar * hbar),
            centered.norm_sqr() / (hbar * hbar),
        )?;
        let udot = self.velocity(params, &der)?;
        let hu_norm2 = hu.norm_sqr() / (hbar * hbar);
        let energy_norm = checked_sqrt(hu_norm2 - udot.norm_sqr(), hu_norm2)?;
        let target = hu.scaled(Complex64::new(0.0, -1.0 / hbar));
        let direct = udot.distance(&target)?;
        Ok(EpsilonReport {
            local,
            energy_norm,
            direct,
        })
    }

    /// Energy fluctuation `‖(H_u - E0)u‖` in closed form and on the grid.
    pub fn energy_fluctuation(&self, params: &FrozenParams) -> Result<FluctuationReport> {
        let gh = self.grid_hamiltonian()?;
        let (u, hu) = self.on_grid_state(params)?;
        let der = self.eom(params)?;
        let hbar = params.hbar;
        let closed_form = hbar * der.z_dot.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let fluct = self.fluctuation_vector(params, &der, &u, gh.spectral())?;
        let e0 = inner(&u, &hu)?.re;
        let mut centered = hu;
        centered.axpy((-e0).into(), &u)?;
        Ok(FluctuationReport {
            closed_form,
            assembled: fluct.norm(),
            exact: centered.norm(),
        })
    }

    /// `(H_u - E0)u` assembled with grid ladder operators.
    pub fn fluctuation_vector(
        &self,
        params: &FrozenParams,
        der: &FrozenDerivative,
        u: &GridWavefunction,
        spectral: &Spectral,
    ) -> Result<GridWavefunction> {
        let mut out = GridWavefunction::zeros(u.grid());
        let z = params.z();
        for m in 0..params.dim() {
            let w = Complex64::i() * params.hbar * der.z_dot[m];
            let mut up = raising(u, params.delta, m, spectral)?;
            up.axpy(-z[m].conj(), u)?;
            let mut down = lowering(u, params.delta, m, spectral)?;
            down.axpy(-z[m], u)?;
            out.axpy(w, &up)?;
            out.axpy(w.conj(), &down)?;
        }
        Ok(out)
    }
}

fn checked_sqrt(value: f64, scale: f64) -> Result<f64> {
    if value < -RADICAND_TOLERANCE * scale.max(1.0) {
        return Err(Error::NegativeRadicand { value });
    }
    Ok(value.max(0.0).sqrt())
}

/// Analytic equations of motion for a Schrödinger Hamiltonian.
pub fn eom(
    params: &FrozenParams,
    h: &HamiltonianSpec,
    principle: Principle,
) -> Result<FrozenDerivative> {
    FrozenModel::new(h, principle)?.eom(params)
}

/// Local residual `ε` evaluated on `grid`.
pub fn epsilon(params: &FrozenParams, h: &HamiltonianSpec, grid: &Grid) -> Result<f64> {
    FrozenModel::on_grid(h, Principle::Mvp, grid)?.epsilon(params)
}

/// `ħ|ż|`.
pub fn energy_fluctuation(params: &FrozenParams, h: &HamiltonianSpec, grid: &Grid) -> Result<f64> {
    Ok(FrozenModel::on_grid(h, Principle::Mvp, grid)?
        .energy_fluctuation(params)?
        .closed_form)
}

/// `(ħ/(8δ²) + δ²C2/(2ħ)) √(d² + 2d)`, valid when `C2` bounds the second derivatives of `V`.
pub fn taylor_bound(params: &FrozenParams, c2: f64) -> Result<f64> {
    if !(c2 >= 0.0) {
        return Err(Error::param("c2", "must be nonnegative"));
    }
    let d = params.dim() as f64;
    let (hbar, d2) = (params.hbar, params.delta * params.delta);
    Ok((hbar / (8.0 * d2) + d2 * c2 / (2.0 * hbar)) * (d * d + 2.0 * d).sqrt())
}
