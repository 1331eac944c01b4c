//! Normalized Hartree products `u = φ_1 ⊗ … ⊗ φ_N` with mean-field dynamics.
//!
//! The potential is either a sum of product terms `c Π_m g_m(x_m)` (any `N ≤ 4`)
//! or, for `N = 2`, a table on the two-particle grid. Single-hole functions are
//! never formed: every expectation reduces to one-dimensional quadratures
//! against the densities `|φ_m|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frozen::Principle;
use crate::grid::{inner, Grid, GridWavefunction, Spectral};
use crate::operators::{HamiltonianSpec, PotentialModel};

pub const MAX_PARTICLES: usize = 4;
const NORM_TOLERANCE: f64 = 1e-8;
// RK stages leave the unit sphere by O(dt²‖φ̇‖²); only gross drift is an error.
const STAGE_NORM_TOLERANCE: f64 = 1e-2;
const RADICAND_TOLERANCE: f64 = 1e-12;

/// A one-particle Gaussian `(2πw²)^{-1/4} exp(iα - (x-c)²/(4w²) + i k (x-c)/ħ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub center: f64,
    pub momentum: f64,
    pub width: f64,
    #[serde(default)]
    pub phase: f64,
}

impl GaussianSpec {
    pub fn new(center: f64, momentum: f64, width: f64) -> Self {
        GaussianSpec {
            center,
            momentum,
            width,
            phase: 0.0,
        }
    }

    pub fn value_at(&self, x: f64, hbar: f64) -> Complex64 {
        let y = x - self.center;
        let n = (2.0 * PI * self.width * self.width).powf(-0.25);
        Complex64::new(
            -y * y / (4.0 * self.width * self.width),
            self.phase + self.momentum * y / hbar,
        )
        .exp()
            * n
    }

    pub fn sample(&self, grid: &Grid, hbar: f64) -> Result<GridWavefunction> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::param("initial.particles.width", "must be positive"));
        }
        if grid.dim() != 1 {
            return Err(Error::InvalidGrid(
                "particle grids are one-dimensional".into(),
            ));
        }
        let half = 0.5 * grid.length();
        if self.center.abs() + 5.0 * self.width >= half {
            return Err(Error::SupportViolation {
                axis: 0,
                required: self.center.abs() + 5.0 * self.width,
                half_box: half,
            });
        }
        Ok(GridWavefunction::from_fn(grid, |x| {
            self.value_at(x[0], hbar)
        }))
    }
}

/// `N` normalized one-particle functions on one-dimensional grids.
#[derive(Debug, Clone, PartialEq)]
pub struct HartreeState {
    hbar: f64,
    particles: Vec<GridWavefunction>,
}

impl HartreeState {
    pub fn new(particles: Vec<GridWavefunction>, hbar: f64) -> Result<Self> {
        let state = Self::from_parts(particles, hbar)?;
        for (n, phi) in state.particles.iter().enumerate() {
            let drift = (phi.norm() - 1.0).abs();
            if drift > NORM_TOLERANCE {
                return Err(Error::param(
                    "particles",
                    format!("particle {} has norm {:.12}", n + 1, phi.norm()),
                ));
            }
        }
        Ok(state)
    }

    /// Validates shape only; used for intermediate integrator stages.
    pub fn from_parts(particles: Vec<GridWavefunction>, hbar: f64) -> Result<Self> {
        if !(2..=MAX_PARTICLES).contains(&particles.len()) {
            return Err(Error::param(
                "particles",
                format!(
                    "need 2 to {MAX_PARTICLES} particles, got {}",
                    particles.len()
                ),
            ));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::param("hbar", "must be positive"));
        }
        if particles.iter().any(|p| p.grid().dim() != 1) {
            return Err(Error::InvalidGrid(
                "particle grids are one-dimensional".into(),
            ));
        }
        Ok(HartreeState { hbar, particles })
    }

    pub fn from_gaussians(grid: &Grid, specs: &[GaussianSpec], hbar: f64) -> Result<Self> {
        let particles = specs
            .iter()
            .map(|s| s.sample(grid, hbar))
            .collect::<Result<Vec<_>>>()?;
        let normalized = particles
            .into_iter()
            .map(|p| {
                let n = p.norm();
                p.scaled((1.0 / n).into())
            })
            .collect();
        Self::new(normalized, hbar)
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn particles(&self) -> &[GridWavefunction] {
        &self.particles
    }

    pub fn particles_mut(&mut self) -> &mut [GridWavefunction] {
        &mut self.particles
    }

    pub fn particle(&self, n: usize) -> &GridWavefunction {
        &self.particles[n]
    }

    pub fn grids(&self) -> Vec<Grid> {
        self.particles.iter().map(|p| p.grid().clone()).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.norm()).collect()
    }

    /// Norm of the product, `Π ‖φ_n‖`.
    pub fn norm(&self) -> f64 {
        self.norms().iter().product()
    }

    /// Rescales every factor to unit norm; returns the largest drift removed.
    pub fn renormalize(&mut self) -> f64 {
        let mut drift: f64 = 0.0;
        for p in self.particles.iter_mut() {
            let n = p.norm();
            drift = drift.max((n - 1.0).abs());
            *p = p.scaled((1.0 / n).into());
        }
        drift
    }

    /// Multiplies `φ_n` by `e^{iα_n}`.
    pub fn regauged(&self, phases: &[f64]) -> Self {
        let particles = self
            .particles
            .iter()
            .zip(phases)
            .map(|(p, a)| p.scaled(Complex64::from_polar(1.0, *a)))
            .collect();
        HartreeState {
            hbar: self.hbar,
            particles,
        }
    }
}

/// Time derivative of a Hartree state under the mean-field equations.
#[derive(Debug, Clone)]
pub struct HartreeDerivative {
    pub phi_dot: Vec<GridWavefunction>,
    /// Gauge factor `Re(iħ⟨φ_1|φ̇_1⟩)`.
    pub c1: f64,
    pub e0: f64,
    pub gauge_convention: bool,
}

/// Mean-field potentials `V_n` (tables on particle grids) and `V_0 = ⟨u|Vu⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFields {
    pub potentials: Vec<Vec<f64>>,
    pub v0: f64,
}

/// `E0 = Σ ε_n + V_0` with the one-particle kinetic energies `ε_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Energies {
    pub e0: f64,
    pub kinetic: Vec<f64>,
    pub v0: f64,
}

/// Zero-mean fluctuating potential `Ṽ = V - Σ V_n + (N-1) V_0` on the pair grid.
#[derive(Debug, Clone)]
pub struct Fluctuation {
    pub grid: Grid,
    pub table: Vec<f64>,
    pub potential: Vec<f64>,
    pub mean_fields: MeanFields,
}

#[derive(Debug, Clone)]
struct FactorTable {
    coord: usize,
    values: Vec<f64>,
}

#[derive(Debug, Clone)]
struct TermTable {
    coeff: f64,
    factors: Vec<FactorTable>,
}

impl TermTable {
    fn factor(&self, coord: usize) -> Option<&[f64]> {
        self.factors
            .iter()
            .find(|f| f.coord == coord)
            .map(|f| f.values.as_slice())
    }

    fn mask(&self) -> u32 {
        self.factors.iter().fold(0, |m, f| m | (1 << f.coord))
    }
}

#[derive(Debug, Clone)]
enum Decomposition {
    Terms(Vec<TermTable>),
    /// `V(x_1, x_2)` on the pair grid, flat index `i * M + j`.
    Table(Vec<f64>),
}

/// Mean-field dynamics for one Hamiltonian on fixed particle grids.
#[derive(Debug, Clone)]
pub struct HartreeModel {
    spec: HamiltonianSpec,
    grids: Vec<Grid>,
    spectral: Vec<Spectral>,
    kinetic: Vec<Vec<Complex64>>,
    decomposition: Decomposition,
    principle: Principle,
}

impl HartreeModel {
    pub fn new(spec: &HamiltonianSpec, grids: &[Grid]) -> Result<Self> {
        let n = grids.len();
        if !(2..=MAX_PARTICLES).contains(&n) {
            return Err(Error::param(
                "particles",
                format!("need 2 to {MAX_PARTICLES} particles, got {n}"),
            ));
        }
        if grids.iter().any(|g| g.dim() != 1) {
            return Err(Error::InvalidGrid(
                "particle grids are one-dimensional".into(),
            ));
        }
        spec.potential.validate(n)?;
        let decomposition = match spec.potential.product_terms(n) {
            Some(terms) => Decomposition::Terms(
                terms
                    .into_iter()
                    .map(|t| TermTable {
                        coeff: t.coeff,
                        factors: t
                            .factors
                            .iter()
                            .map(|(c, f)| FactorTable {
                                coord: *c,
                                values: grids[*c].tabulate(|x| f.value(x[0])),
                            })
                            .collect(),
                    })
                    .collect(),
            ),
            None => {
                if n != 2 || grids[0] != grids[1] {
                    return Err(Error::Unsupported(
                        "tabulated potentials need two particles on equal grids".into(),
                    ));
                }
                let pair = pair_grid(&grids[0])?;
                Decomposition::Table(spec.potential.tabulate(&pair)?)
            }
        };
        let spectral: Vec<Spectral> = grids.iter().map(Spectral::new).collect();
        let half_h2 = 0.5 * spec.hbar * spec.hbar;
        let kinetic = spectral
            .iter()
            .enumerate()
            .map(|(m, s)| {
                s.kinetic_symbol(&[spec.scale(m)])
                    .into_iter()
                    .map(|k2| Complex64::new(half_h2 * k2, 0.0))
                    .collect()
            })
            .collect();
        Ok(HartreeModel {
            spec: spec.clone(),
            grids: grids.to_vec(),
            spectral,
            kinetic,
            decomposition,
            principle: Principle::Mvp,
        })
    }

    pub fn with_principle(mut self, principle: Principle) -> Self {
        self.principle = principle;
        self
    }

    pub fn principle(&self) -> Principle {
        self.principle
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn grids(&self) -> &[Grid] {
        &self.grids
    }

    fn check(&self, state: &HartreeState) -> Result<()> {
        if state.len() != self.grids.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grids.len(),
                found: state.len(),
            });
        }
        if state
            .particles()
            .iter()
            .zip(&self.grids)
            .any(|(p, g)| p.grid() != g)
        {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Quadrature weights `h |φ_m|²`.
    fn densities(state: &HartreeState) -> Vec<Vec<f64>> {
        state
            .particles()
            .iter()
            .map(|p| {
                let h = p.grid().spacing();
                p.values().iter().map(|c| h * c.norm_sqr()).collect()
            })
            .collect()
    }

    /// `⟨φ_m|g_{s,m} φ_m⟩` for every term `s` and particle `m` (1 where absent).
    fn factor_means(terms: &[TermTable], rho: &[Vec<f64>]) -> Vec<Vec<f64>> {
        terms
            .iter()
            .map(|t| {
                (0..rho.len())
                    .map(|m| t.factor(m).map_or(1.0, |g| weighted(&rho[m], g)))
                    .collect()
            })
            .collect()
    }

    pub fn mean_fields(&self, state: &HartreeState) -> Result<MeanFields> {
        self.check(state)?;
        let rho = Self::densities(state);
        let n = state.len();
        match &self.decomposition {
            Decomposition::Terms(terms) => {
                let a = Self::factor_means(terms, &rho);
                let mut potentials: Vec<Vec<f64>> =
                    self.grids.iter().map(|g| vec![0.0; g.points()]).collect();
                let mut v0 = 0.0;
                for (t, at) in terms.iter().zip(&a) {
                    v0 += t.coeff * at.iter().product::<f64>();
                    for (k, table) in potentials.iter_mut().enumerate() {
                        let others: f64 = (0..n).filter(|&m| m != k).map(|m| at[m]).product();
                        let w = t.coeff * others;
                        match t.factor(k) {
                            Some(g) => table.iter_mut().zip(g).for_each(|(v, gi)| *v += w * gi),
                            None => table.iter_mut().for_each(|v| *v += w),
                        }
                    }
                }
                Ok(MeanFields { potentials, v0 })
            }
            Decomposition::Table(v) => {
                let m = self.grids[0].points();
                let mut v1 = vec![0.0; m];
                let mut v2 = vec![0.0; m];
                for i in 0..m {
                    for j in 0..m {
                        let val = v[i * m + j];
                        v1[i] += val * rho[1][j];
                        v2[j] += val * rho[0][i];
                    }
                }
                let v0 = weighted(&rho[0], &v1);
                Ok(MeanFields {
                    potentials: vec![v1, v2],
                    v0,
                })
            }
        }
    }

    fn kinetic_apply(&self, n: usize, phi: &GridWavefunction) -> Result<GridWavefunction> {
        let out = self.spectral[n].apply_symbol(phi.values(), &self.kinetic[n]);
        GridWavefunction::new(phi.grid().clone(), out)
    }

    pub fn energies(&self, state: &HartreeState) -> Result<Energies> {
        let fields = self.mean_fields(state)?;
        self.energies_with(state, &fields)
    }

    fn energies_with(&self, state: &HartreeState, fields: &MeanFields) -> Result<Energies> {
        let kinetic = state
            .particles()
            .iter()
            .enumerate()
            .map(|(n, phi)| Ok(inner(phi, &self.kinetic_apply(n, phi)?)?.re))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Energies {
            e0: kinetic.iter().sum::<f64>() + fields.v0,
            kinetic,
            v0: fields.v0,
        })
    }

    /// `iħφ̇_n = (H_n + c1 δ_{1n} - E0) φ_n` with `c1 = E0`.
    pub fn eom(&self, state: &HartreeState) -> Result<HartreeDerivative> {
        self.check(state)?;
        for (n, norm) in state.norms().iter().enumerate() {
            if (norm - 1.0).abs() > STAGE_NORM_TOLERANCE {
                return Err(Error::Accuracy(format!(
                    "particle {} has norm {norm:.8}",
                    n + 1
                )));
            }
        }
        let fields = self.mean_fields(state)?;
        let en = self.energies_with(state, &fields)?;
        let total_kinetic: f64 = en.kinetic.iter().sum();
        let c1 = en.e0;
        let factor = Complex64::new(0.0, -1.0 / state.hbar());
        let mut phi_dot = Vec::with_capacity(state.len());
        for (n, phi) in state.particles().iter().enumerate() {
            let mut hphi = self.kinetic_apply(n, phi)?;
            let mut diag: Vec<f64> = fields.potentials[n].clone();
            let shift = total_kinetic - en.kinetic[n] + if n == 0 { c1 } else { 0.0 } - en.e0;
            diag.iter_mut().for_each(|v| *v += shift);
            hphi.axpy(1.0.into(), &phi.multiplied(&diag)?)?;
            phi_dot.push(hphi.scaled(factor));
        }
        let c1_measured =
            (inner(state.particle(0), &phi_dot[0])? * Complex64::i() * state.hbar()).re;
        Ok(HartreeDerivative {
            phi_dot,
            c1: c1_measured,
            e0: en.e0,
            gauge_convention: self.principle == Principle::Tdvp,
        })
    }

    /// `ε = ‖Ṽu‖/ħ`, evaluated from factor covariances so that it does not
    /// suffer cancellation.
    pub fn epsilon(&self, state: &HartreeState) -> Result<f64> {
        self.check(state)?;
        let hbar = state.hbar();
        match &self.decomposition {
            Decomposition::Terms(terms) => {
                let rho = Self::densities(state);
                let a = Self::factor_means(terms, &rho);
                let n = state.len();
                let mut total = 0.0;
                for (s, ts) in terms.iter().enumerate() {
                    for (t, tt) in terms.iter().enumerate().skip(s) {
                        let common = ts.mask() & tt.mask();
                        if common.count_ones() < 2 {
                            continue;
                        }
                        let cov: Vec<f64> = (0..n)
                            .map(|m| {
                                if common & (1 << m) == 0 {
                                    return 0.0;
                                }
                                let (gs, gt) = (ts.factor(m).unwrap(), tt.factor(m).unwrap());
                                rho[m]
                                    .iter()
                                    .zip(gs.iter().zip(gt))
                                    .map(|(r, (x, y))| r * (x - a[s][m]) * (y - a[t][m]))
                                    .sum()
                            })
                            .collect();
                        let mut pair = 0.0;
                        let mut sub = common;
                        while sub != 0 {
                            if sub.count_ones() >= 2 {
                                let mut prod = 1.0;
                                for (m, c) in cov.iter().enumerate() {
                                    prod *= if sub & (1 << m) != 0 {
                                        *c
                                    } else {
                                        a[s][m] * a[t][m]
                                    };
                                }
                                pair += prod;
                            }
                            sub = (sub - 1) & common;
                        }
                        let weight = if s == t { 1.0 } else { 2.0 };
                        total += weight * ts.coeff * tt.coeff * pair;
                    }
                }
                radicand_sqrt(total, 1.0).map(|e| e / hbar)
            }
            Decomposition::Table(_) => {
                let f = self.fluctuating_potential(state)?;
                let u = assemble_product(state)?;
                Ok(u.multiplied(&f.table)?.norm() / hbar)
            }
        }
    }

    /// `ε² ħ² = ‖Vu‖² - Σ‖V_n φ_n‖² + (N-1)V_0²`, term by term.
    pub fn epsilon_literal(&self, state: &HartreeState) -> Result<f64> {
        self.check(state)?;
        let rho = Self::densities(state);
        let fields = self.mean_fields(state)?;
        let n = state.len();
        let vu2 = match &self.decomposition {
            Decomposition::Terms(terms) => {
                let mut acc = 0.0;
                for ts in terms {
                    for tt in terms {
                        let mut prod = ts.coeff * tt.coeff;
                        for (m, r) in rho.iter().enumerate() {
                            prod *= match (ts.factor(m), tt.factor(m)) {
                                (Some(x), Some(y)) => r
                                    .iter()
                                    .zip(x.iter().zip(y))
                                    .map(|(r, (a, b))| r * a * b)
                                    .sum(),
                                (Some(x), None) | (None, Some(x)) => weighted(r, x),
                                (None, None) => r.iter().sum(),
                            };
                        }
                        acc += prod;
                    }
                }
                acc
            }
            Decomposition::Table(v) => {
                let m = self.grids[0].points();
                let mut acc = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        acc += rho[0][i] * rho[1][j] * v[i * m + j].powi(2);
                    }
                }
                acc
            }
        };
        let mean_sq: f64 = fields
            .potentials
            .iter()
            .zip(&rho)
            .map(|(v, r)| r.iter().zip(v).map(|(r, v)| r * v * v).sum::<f64>())
            .sum();
        let value = vu2 - mean_sq + (n as f64 - 1.0) * fields.v0 * fields.v0;
        radicand_sqrt(value, vu2).map(|e| e / state.hbar())
    }

    /// `Ṽ` tabulated on the pair grid (`N = 2`, equal particle grids).
    pub fn fluctuating_potential(&self, state: &HartreeState) -> Result<Fluctuation> {
        let grid = pair_grid_of(state)?;
        self.check(state)?;
        let m = grid.points();
        let potential = match &self.decomposition {
            Decomposition::Table(v) => v.clone(),
            Decomposition::Terms(terms) => {
                let mut v = vec![0.0; m * m];
                for t in terms {
                    let f0 = t.factor(0);
                    let f1 = t.factor(1);
                    for i in 0..m {
                        let a = t.coeff * f0.map_or(1.0, |g| g[i]);
                        for j in 0..m {
                            v[i * m + j] += a * f1.map_or(1.0, |g| g[j]);
                        }
                    }
                }
                v
            }
        };
        let fields = self.mean_fields(state)?;
        let (v1, v2) = (&fields.potentials[0], &fields.potentials[1]);
        let mut table = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                table[i * m + j] = potential[i * m + j] - v1[i] - v2[j] + fields.v0;
            }
        }
        Ok(Fluctuation {
            grid,
            table,
            potential,
            mean_fields: fields,
        })
    }
}

fn weighted(rho: &[f64], g: &[f64]) -> f64 {
    rho.iter().zip(g).map(|(r, v)| r * v).sum()
}

fn radicand_sqrt(value: f64, scale: f64) -> Result<f64> {
    if value < -RADICAND_TOLERANCE * scale.abs().max(1.0) {
        return Err(Error::NegativeRadicand { value });
    }
    Ok(value.max(0.0).sqrt())
}

fn pair_grid(g: &Grid) -> Result<Grid> {
    Grid::new(2, g.length(), g.points())
}

fn pair_grid_of(state: &HartreeState) -> Result<Grid> {
    if state.len() != 2 {
        return Err(Error::Unsupported(format!(
            "two-particle tables need N = 2, got {}",
            state.len()
        )));
    }
    let (a, b) = (state.particle(0).grid(), state.particle(1).grid());
    if a != b {
        return Err(Error::GridMismatch);
    }
    pair_grid(a)
}

/// `φ_1 ⊗ φ_2` on the pair grid.
pub fn assemble_product(state: &HartreeState) -> Result<GridWavefunction> {
    let grid = pair_grid_of(state)?;
    let (a, b) = (state.particle(0).values(), state.particle(1).values());
    let values = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect();
    GridWavefunction::new(grid, values)
}

pub fn hartree_eom(
    state: &HartreeState,
    h: &HamiltonianSpec,
    principle: Principle,
) -> Result<HartreeDerivative> {
    HartreeModel::new(h, &state.grids())?
        .with_principle(principle)
        .eom(state)
}

pub fn fluctuating_potential(state: &HartreeState, v: &PotentialModel) -> Result<Fluctuation> {
    let spec = HamiltonianSpec::new(state.hbar(), v.clone())?;
    HartreeModel::new(&spec, &state.grids())?.fluctuating_potential(state)
}

pub fn epsilon_hartree(state: &HartreeState, v: &PotentialModel) -> Result<f64> {
    let spec = HamiltonianSpec::new(state.hbar(), v.clone())?;
    HartreeModel::new(&spec, &state.grids())?.epsilon(state)
}

pub fn energies(state: &HartreeState, h: &HamiltonianSpec) -> Result<Energies> {
    HartreeModel::new(h, &state.grids())?.energies(state)
}
