//! Potentials and Schrödinger Hamiltonians `H = -(ħ²/2) Σ s_m ∂²_m + V`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridWavefunction, Spectral};
use crate::hartree::{HartreeModel, HartreeState};

/// One-dimensional building blocks of the analytic potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    /// `x`
    Coordinate,
    /// `k x² / 2`
    Harmonic { k: f64 },
    /// `k2 x² / 2 + k4 x⁴ / 4`
    Quartic { k2: f64, k4: f64 },
    /// `D (1 - e^{-a (x - x0)})²`
    Morse { depth: f64, a: f64, x0: f64 },
    /// `a x⁴ - b x²`
    DoubleWell { a: f64, b: f64 },
}

impl Elementary {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Elementary::Coordinate => x,
            Elementary::Harmonic { k } => 0.5 * k * x * x,
            Elementary::Quartic { k2, k4 } => 0.5 * k2 * x * x + 0.25 * k4 * x.powi(4),
            Elementary::Morse { depth, a, x0 } => {
                let e = (-a * (x - x0)).exp();
                depth * (1.0 - e) * (1.0 - e)
            }
            Elementary::DoubleWell { a, b } => a * x.powi(4) - b * x * x,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Elementary::Coordinate => 1.0,
            Elementary::Harmonic { k } => k * x,
            Elementary::Quartic { k2, k4 } => k2 * x + k4 * x.powi(3),
            Elementary::Morse { depth, a, x0 } => {
                let e = (-a * (x - x0)).exp();
                2.0 * depth * a * (e - e * e)
            }
            Elementary::DoubleWell { a, b } => 4.0 * a * x.powi(3) - 2.0 * b * x,
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match *self {
            Elementary::Coordinate => 0.0,
            Elementary::Harmonic { k } => k,
            Elementary::Quartic { k2, k4 } => k2 + 3.0 * k4 * x * x,
            Elementary::Morse { depth, a, x0 } => {
                let e = (-a * (x - x0)).exp();
                2.0 * depth * a * a * (2.0 * e * e - e)
            }
            Elementary::DoubleWell { a, b } => 12.0 * a * x * x - 2.0 * b,
        }
    }

    /// `E[f(X)]` for `X ~ N(mean, sigma²)`.
    pub fn gaussian_mean(&self, mean: f64, sigma: f64) -> f64 {
        let m = gaussian_raw_moments(mean, sigma);
        match *self {
            Elementary::Coordinate => mean,
            Elementary::Harmonic { k } => 0.5 * k * m[2],
            Elementary::Quartic { k2, k4 } => 0.5 * k2 * m[2] + 0.25 * k4 * m[4],
            Elementary::Morse { depth, a, x0 } => {
                let e1 = exp_moment(1.0, a, x0, mean, sigma);
                let e2 = exp_moment(2.0, a, x0, mean, sigma);
                depth * (1.0 - 2.0 * e1 + e2)
            }
            Elementary::DoubleWell { a, b } => a * m[4] - b * m[2],
        }
    }

    /// `E[f'(X)]` for `X ~ N(mean, sigma²)`.
    pub fn gaussian_mean_derivative(&self, mean: f64, sigma: f64) -> f64 {
        let m = gaussian_raw_moments(mean, sigma);
        match *self {
            Elementary::Coordinate => 1.0,
            Elementary::Harmonic { k } => k * mean,
            Elementary::Quartic { k2, k4 } => k2 * mean + k4 * m[3],
            Elementary::Morse { depth, a, x0 } => {
                let e1 = exp_moment(1.0, a, x0, mean, sigma);
                let e2 = exp_moment(2.0, a, x0, mean, sigma);
                2.0 * depth * a * (e1 - e2)
            }
            Elementary::DoubleWell { a, b } => 4.0 * a * m[3] - 2.0 * b * mean,
        }
    }
}

fn gaussian_raw_moments(mu: f64, sigma: f64) -> [f64; 5] {
    let s2 = sigma * sigma;
    [
        1.0,
        mu,
        mu * mu + s2,
        mu.powi(3) + 3.0 * mu * s2,
        mu.powi(4) + 6.0 * mu * mu * s2 + 3.0 * s2 * s2,
    ]
}

/// `E[exp(-s a (X - x0))]`
fn exp_moment(s: f64, a: f64, x0: f64, mu: f64, sigma: f64) -> f64 {
    (-s * a * (mu - x0) + 0.5 * s * s * a * a * sigma * sigma).exp()
}

/// `coeff · Π f_m(x_m)` over distinct coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub coeff: f64,
    pub factors: Vec<(usize, Elementary)>,
}

impl ProductTerm {
    pub fn factor_on(&self, coord: usize) -> Option<&Elementary> {
        self.factors
            .iter()
            .find(|(c, _)| *c == coord)
            .map(|(_, f)| f)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.coeff
            * self
                .factors
                .iter()
                .map(|(c, f)| f.value(x[*c]))
                .product::<f64>()
    }
}

/// A potential tabulated on a grid; gradients come from spectral differentiation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential {
    grid: Grid,
    values: Vec<f64>,
    gradient: Vec<Vec<f64>>,
}

impl TabulatedPotential {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("potential.values", "non-finite entry"));
        }
        let spectral = Spectral::new(&grid);
        let gradient = (0..grid.dim())
            .map(|axis| spectral.derivative_real(&values, axis))
            .collect();
        Ok(TabulatedPotential {
            grid,
            values,
            gradient,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gradient_table(&self, axis: usize) -> &[f64] {
        &self.gradient[axis]
    }

    /// Periodic multilinear interpolation of a table on this grid.
    fn interpolate(&self, table: &[f64], x: &[f64]) -> f64 {
        let m = self.grid.points();
        let h = self.grid.spacing();
        let locate = |xi: f64| {
            let s = (xi + 0.5 * self.grid.length()) / h;
            let f = s.floor();
            let i0 = (f as i64).rem_euclid(m as i64) as usize;
            (i0, (i0 + 1) % m, s - f)
        };
        match self.grid.dim() {
            1 => {
                let (i0, i1, t) = locate(x[0]);
                (1.0 - t) * table[i0] + t * table[i1]
            }
            _ => {
                let (i0, i1, t) = locate(x[0]);
                let (j0, j1, u) = locate(x[1]);
                (1.0 - t) * (1.0 - u) * table[i0 * m + j0]
                    + t * (1.0 - u) * table[i1 * m + j0]
                    + (1.0 - t) * u * table[i0 * m + j1]
                    + t * u * table[i1 * m + j1]
            }
        }
    }
}

/// Symbolic potential `V(x)`.
///
/// Per-coordinate variants (`Harmonic`, `Quartic`, `Morse`, `DoubleWell`) act
/// as `Σ_m f(x_m)` in any dimension. `Constant` is added once.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialModel {
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
        x0: f64,
    },
    DoubleWell {
        a: f64,
        b: f64,
    },
    Constant {
        c: f64,
    },
    /// `μ · x`
    Linear {
        mu: Vec<f64>,
    },
    /// `Σ_m V⁽ᵐ⁾(x_m)`, one one-dimensional model per coordinate.
    SeparableSum(Vec<PotentialModel>),
    /// `λ x_first x_second`
    PairProduct {
        lambda: f64,
        first: usize,
        second: usize,
    },
    Sum(Vec<PotentialModel>),
    Custom(TabulatedPotential),
}

impl PotentialModel {
    /// `λ x_1 x_2`.
    pub fn pair(lambda: f64) -> Self {
        PotentialModel::PairProduct {
            lambda,
            first: 0,
            second: 1,
        }
    }

    fn elementary(&self) -> Option<Elementary> {
        match *self {
            PotentialModel::Harmonic { k } => Some(Elementary::Harmonic { k }),
            PotentialModel::Quartic { k2, k4 } => Some(Elementary::Quartic { k2, k4 }),
            PotentialModel::Morse { depth, a, x0 } => Some(Elementary::Morse { depth, a, x0 }),
            PotentialModel::DoubleWell { a, b } => Some(Elementary::DoubleWell { a, b }),
            _ => None,
        }
    }

    /// Checks that the model can be evaluated on `dim` coordinates.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let finite = |name: &str, vals: &[f64]| {
            if vals.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(Error::param(name, "coefficients must be finite"))
            }
        };
        match self {
            PotentialModel::Harmonic { k } => finite("harmonic", &[*k]),
            PotentialModel::Quartic { k2, k4 } => finite("quartic", &[*k2, *k4]),
            PotentialModel::Morse { depth, a, x0 } => finite("morse", &[*depth, *a, *x0]),
            PotentialModel::DoubleWell { a, b } => finite("double_well", &[*a, *b]),
            PotentialModel::Constant { c } => finite("constant", &[*c]),
            PotentialModel::Linear { mu } => {
                finite("linear", mu)?;
                if mu.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: mu.len(),
                    });
                }
                Ok(())
            }
            PotentialModel::SeparableSum(terms) => {
                if terms.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: terms.len(),
                    });
                }
                terms.iter().try_for_each(|t| t.validate(1))
            }
            PotentialModel::PairProduct {
                lambda,
                first,
                second,
            } => {
                finite("pair_product", &[*lambda])?;
                if first == second {
                    return Err(Error::param(
                        "pair_product",
                        "coupled coordinates must differ",
                    ));
                }
                if (*first).max(*second) >= dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: (*first).max(*second) + 1,
                    });
                }
                Ok(())
            }
            PotentialModel::Sum(terms) => terms.iter().try_for_each(|t| t.validate(dim)),
            PotentialModel::Custom(t) => {
                if t.grid.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: t.grid.dim(),
                    });
                }
                Ok(())
            }
        }
    }

    /// True when `V` is a sum of one-coordinate terms.
    pub fn is_separable(&self) -> bool {
        match self {
            PotentialModel::PairProduct { lambda, .. } => *lambda == 0.0,
            PotentialModel::Sum(terms) => terms.iter().all(|t| t.is_separable()),
            PotentialModel::Custom(_) => false,
            _ => true,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        if let Some(e) = self.elementary() {
            return x.iter().map(|&xi| e.value(xi)).sum();
        }
        match self {
            PotentialModel::Constant { c } => *c,
            PotentialModel::Linear { mu } => mu.iter().zip(x).map(|(m, xi)| m * xi).sum(),
            PotentialModel::SeparableSum(terms) => {
                terms.iter().zip(x).map(|(t, &xi)| t.value(&[xi])).sum()
            }
            PotentialModel::PairProduct {
                lambda,
                first,
                second,
            } => lambda * x[*first] * x[*second],
            PotentialModel::Sum(terms) => terms.iter().map(|t| t.value(x)).sum(),
            PotentialModel::Custom(t) => t.interpolate(&t.values, x),
            _ => unreachable!(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        self.add_gradient(x, &mut g);
        g
    }

    fn add_gradient(&self, x: &[f64], g: &mut [f64]) {
        if let Some(e) = self.elementary() {
            for (gi, &xi) in g.iter_mut().zip(x) {
                *gi += e.derivative(xi);
            }
            return;
        }
        match self {
            PotentialModel::Constant { .. } => {}
            PotentialModel::Linear { mu } => {
                for (gi, m) in g.iter_mut().zip(mu) {
                    *gi += m;
                }
            }
            PotentialModel::SeparableSum(terms) => {
                for (m, t) in terms.iter().enumerate() {
                    g[m] += t.gradient(&[x[m]])[0];
                }
            }
            PotentialModel::PairProduct {
                lambda,
                first,
                second,
            } => {
                g[*first] += lambda * x[*second];
                g[*second] += lambda * x[*first];
            }
            PotentialModel::Sum(terms) => terms.iter().for_each(|t| t.add_gradient(x, g)),
            PotentialModel::Custom(t) => {
                for (axis, gi) in g.iter_mut().enumerate() {
                    *gi += t.interpolate(&t.gradient[axis], x);
                }
            }
            _ => unreachable!(),
        }
    }

    /// Expansion into product terms; `None` for tabulated potentials.
    pub fn product_terms(&self, dim: usize) -> Option<Vec<ProductTerm>> {
        if let Some(e) = self.elementary() {
            return Some(
                (0..dim)
                    .map(|m| ProductTerm {
                        coeff: 1.0,
                        factors: vec![(m, e)],
                    })
                    .collect(),
            );
        }
        match self {
            PotentialModel::Constant { c } => Some(vec![ProductTerm {
                coeff: *c,
                factors: vec![],
            }]),
            PotentialModel::Linear { mu } => Some(
                mu.iter()
                    .enumerate()
                    .map(|(m, &c)| ProductTerm {
                        coeff: c,
                        factors: vec![(m, Elementary::Coordinate)],
                    })
                    .collect(),
            ),
            PotentialModel::SeparableSum(terms) => {
                let mut out = Vec::new();
                for (m, t) in terms.iter().enumerate() {
                    for mut term in t.product_terms(1)? {
                        for f in term.factors.iter_mut() {
                            f.0 = m;
                        }
                        out.push(term);
                    }
                }
                Some(out)
            }
            PotentialModel::PairProduct {
                lambda,
                first,
                second,
            } => Some(vec![ProductTerm {
                coeff: *lambda,
                factors: vec![
                    (*first, Elementary::Coordinate),
                    (*second, Elementary::Coordinate),
                ],
            }]),
            PotentialModel::Sum(terms) => {
                let mut out = Vec::new();
                for t in terms {
                    out.extend(t.product_terms(dim)?);
                }
                Some(out)
            }
            PotentialModel::Custom(_) => None,
            _ => unreachable!(),
        }
    }

    /// Samples `V` on every node of `grid`.
    pub fn tabulate(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.validate(grid.dim())?;
        if let PotentialModel::Custom(t) = self {
            if &t.grid == grid {
                return Ok(t.values.clone());
            }
        }
        if let Some(terms) = self.product_terms(grid.dim()) {
            return Ok(grid.tabulate(|x| terms.iter().map(|t| t.value(x)).sum()));
        }
        Ok(grid.tabulate(|x| self.value(x)))
    }

    /// Gaussian averages `(⟨V⟩, ⟨∇V⟩)` for a product Gaussian with the given
    /// per-coordinate means and common width; `None` when `V` is tabulated.
    pub fn gaussian_moments(&self, means: &[f64], sigma: f64) -> Option<(f64, Vec<f64>)> {
        let terms = self.product_terms(means.len())?;
        let mut value = 0.0;
        let mut grad = vec![0.0; means.len()];
        for term in &terms {
            let avgs: Vec<f64> = term
                .factors
                .iter()
                .map(|(c, f)| f.gaussian_mean(means[*c], sigma))
                .collect();
            value += term.coeff * avgs.iter().product::<f64>();
            for (i, (c, f)) in term.factors.iter().enumerate() {
                let others: f64 = avgs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, a)| a)
                    .product();
                grad[*c] += term.coeff * f.gaussian_mean_derivative(means[*c], sigma) * others;
            }
        }
        Some((value, grad))
    }
}

/// Parameters of a Hamiltonian `λ A†·A + μ·q̂ + ω` for ladder operators of width δ.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactClass {
    pub delta: f64,
    pub lambda: f64,
    pub mu: Vec<f64>,
    pub omega: f64,
}

/// Unit-mass Schrödinger Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub hbar: f64,
    pub potential: PotentialModel,
    /// Per-coordinate kinetic scale factors `s_m`; empty means all ones.
    pub kinetic_scale: Vec<f64>,
    pub exact_class: Option<ExactClass>,
}

impl HamiltonianSpec {
    pub fn new(hbar: f64, potential: PotentialModel) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::param("hbar", "must be positive"));
        }
        Ok(HamiltonianSpec {
            hbar,
            potential,
            kinetic_scale: Vec::new(),
            exact_class: None,
        })
    }

    pub fn with_kinetic_scale(mut self, scale: Vec<f64>) -> Result<Self> {
        if scale.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::param("kinetic_scale", "entries must be positive"));
        }
        self.kinetic_scale = scale;
        Ok(self)
    }

    /// The unit-mass Hamiltonian `λ A†·A + μ·q̂ + ω` in `d` dimensions; unit
    /// mass forces `λ = ħ²/(2δ²)`.
    pub fn exact_class(hbar: f64, delta: f64, mu: Vec<f64>, omega: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::param("delta", "must be positive"));
        }
        let d = mu.len();
        let lambda = hbar * hbar / (2.0 * delta * delta);
        let potential = PotentialModel::Sum(vec![
            PotentialModel::Harmonic {
                k: lambda / (2.0 * delta * delta),
            },
            PotentialModel::Linear { mu: mu.clone() },
            PotentialModel::Constant {
                c: omega - 0.5 * lambda * d as f64,
            },
        ]);
        let mut spec = HamiltonianSpec::new(hbar, potential)?;
        spec.exact_class = Some(ExactClass {
            delta,
            lambda,
            mu,
            omega,
        });
        Ok(spec)
    }

    pub fn scale(&self, axis: usize) -> f64 {
        self.kinetic_scale.get(axis).copied().unwrap_or(1.0)
    }
}

/// Width `δ` for which `V = (k/2)|x|²` lies in the exact class: `δ² = ħ / (2√k)`.
pub fn matched_width(k: f64, hbar: f64) -> Result<f64> {
    if !(k > 0.0 && hbar > 0.0) {
        return Err(Error::param("k", "matched width needs k > 0 and hbar > 0"));
    }
    Ok((hbar / (2.0 * k.sqrt())).sqrt())
}

/// A Hamiltonian bound to a grid: potential table and kinetic symbol precomputed.
#[derive(Debug, Clone)]
pub struct GridHamiltonian {
    spec: HamiltonianSpec,
    spectral: Spectral,
    potential: Vec<f64>,
    kinetic: Vec<Complex64>,
}

impl GridHamiltonian {
    pub fn new(spec: &HamiltonianSpec, grid: &Grid) -> Result<Self> {
        let spectral = Spectral::new(grid);
        let potential = spec.potential.tabulate(grid)?;
        let half_h2 = 0.5 * spec.hbar * spec.hbar;
        let kinetic = spectral
            .kinetic_symbol(&spec.kinetic_scale)
            .into_iter()
            .map(|k2| Complex64::new(half_h2 * k2, 0.0))
            .collect();
        Ok(GridHamiltonian {
            spec: spec.clone(),
            spectral,
            potential,
            kinetic,
        })
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        self.spectral.grid()
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn potential_table(&self) -> &[f64] {
        &self.potential
    }

    /// `Hu = -(ħ²/2)Δu + V u`, Laplacian applied spectrally.
    pub fn apply(&self, u: &GridWavefunction) -> Result<GridWavefunction> {
        if u.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let mut out = self.spectral.apply_symbol(u.values(), &self.kinetic);
        for ((o, &v), &w) in out.iter_mut().zip(u.values()).zip(&self.potential) {
            *o += w * v;
        }
        GridWavefunction::new(self.grid().clone(), out)
    }

    /// `⟨u|Hu⟩` (real part).
    pub fn energy(&self, u: &GridWavefunction) -> Result<f64> {
        Ok(crate::grid::inner(u, &self.apply(u)?)?.re)
    }
}

pub fn apply_h(h: &HamiltonianSpec, u: &GridWavefunction) -> Result<GridWavefunction> {
    GridHamiltonian::new(h, u.grid())?.apply(u)
}

/// `⟨u|(∇V)u⟩` by quadrature.
pub fn grad_v_expectation(v: &PotentialModel, u: &GridWavefunction) -> Result<Vec<f64>> {
    let grid = u.grid();
    let d = grid.dim();
    v.validate(d)?;
    let w = grid.cell_volume();
    if let PotentialModel::Custom(t) = v {
        if t.grid() != grid {
            return Err(Error::GridMismatch);
        }
        return Ok((0..d)
            .map(|axis| {
                w * u
                    .values()
                    .iter()
                    .zip(t.gradient_table(axis))
                    .map(|(c, g)| c.norm_sqr() * g)
                    .sum::<f64>()
            })
            .collect());
    }
    let mut acc = vec![0.0; d];
    for (p, c) in grid.positions().iter().zip(u.values()) {
        let rho = c.norm_sqr();
        if rho == 0.0 {
            continue;
        }
        for (a, g) in acc.iter_mut().zip(v.gradient(&p[..d])) {
            *a += rho * g;
        }
    }
    Ok(acc.into_iter().map(|a| a * w).collect())
}

/// The `n`-th mean-field potential `V_n(x_n) = ⟨ψ_n|V ψ_n⟩` on particle `n`'s grid.
pub fn mean_field_reduce(v: &PotentialModel, state: &HartreeState, n: usize) -> Result<Vec<f64>> {
    let spec = HamiltonianSpec::new(state.hbar(), v.clone())?;
    let model = HartreeModel::new(&spec, &state.grids())?;
    let fields = model.mean_fields(state)?;
    fields
        .potentials
        .into_iter()
        .nth(n)
        .ok_or(Error::DimensionMismatch {
            expected: state.len(),
            found: n + 1,
        })
}

/// Second-order central-difference Laplacian; periodic wrap.
pub fn finite_difference_laplacian(u: &GridWavefunction) -> Result<GridWavefunction> {
    let g = u.grid();
    if g.dim() != 1 {
        return Err(Error::Unsupported("finite differences in 1D only".into()));
    }
    let m = g.points();
    let h2 = g.spacing() * g.spacing();
    let v = u.values();
    let out = (0..m)
        .map(|j| (v[(j + m - 1) % m] - 2.0 * v[j] + v[(j + 1) % m]) / h2)
        .collect();
    GridWavefunction::new(g.clone(), out)
}
