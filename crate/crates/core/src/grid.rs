//! Uniform periodic grids and the discretized Hilbert space.
//!
//! A [`Grid`] covers the box `[-L/2, L/2)^d` with `M` points per axis. States
//! are stored as flat complex arrays in row-major order: for `d = 2` the flat
//! index `i * M + j` carries the point `(x[i], x[j])`. All integrals use the
//! uniform-weight (trapezoidal) rule, which is spectrally accurate for
//! functions that decay well inside the box.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    dim: usize,
    length: f64,
    points: usize,
}

impl Grid {
    pub const DEFAULT_MAX_POINTS: usize = 1 << 22;

    pub fn new(dim: usize, length: f64, points: usize) -> Result<Self> {
        Self::with_budget(dim, length, points, Self::DEFAULT_MAX_POINTS)
    }

    /// Builds a grid, refusing layouts whose `M^d` exceeds `max_points`.
    pub fn with_budget(dim: usize, length: f64, points: usize, max_points: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension {dim} not supported (1 or 2)"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length {length} must be positive"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{points} points per axis: need a power of two >= 8"
            )));
        }
        let total = points
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidGrid("point count overflows".into()))?;
        if total > max_points {
            return Err(Error::InvalidGrid(format!(
                "{total} grid points exceed the budget of {max_points}"
            )));
        }
        Ok(Grid {
            dim,
            length,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of samples, `M^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Quadrature weight `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Node coordinates along one axis: `-L/2 + j h`.
    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points)
            .map(|j| -0.5 * self.length + j as f64 * h)
            .collect()
    }

    /// Angular wavenumbers in FFT ordering.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let m = self.points as i64;
        let dk = 2.0 * PI / self.length;
        (0..m)
            .map(|j| if j < m / 2 { j } else { j - m } as f64 * dk)
            .collect()
    }

    pub fn k_max(&self) -> f64 {
        PI / self.spacing()
    }

    /// Coordinate `axis` of the flat index `idx`.
    pub fn coordinate(&self, idx: usize, axis: usize) -> f64 {
        let j = match (self.dim, axis) {
            (1, _) => idx,
            (_, 0) => idx / self.points,
            _ => idx % self.points,
        };
        -0.5 * self.length + j as f64 * self.spacing()
    }

    /// All node positions, flat order; unused trailing components are zero.
    pub fn positions(&self) -> Vec<[f64; 2]> {
        let ax = self.axis();
        match self.dim {
            1 => ax.iter().map(|&x| [x, 0.0]).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for &x1 in &ax {
                    for &x2 in &ax {
                        out.push([x1, x2]);
                    }
                }
                out
            }
        }
    }

    /// Samples a real function at every node.
    pub fn tabulate(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        self.positions().iter().map(|p| f(&p[..self.dim])).collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}D grid, L = {}, M = {}",
            self.dim, self.length, self.points
        )
    }
}

/// Complex samples of a state on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(GridWavefunction { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        GridWavefunction {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let d = grid.dim();
        let values = grid.positions().iter().map(|p| f(&p[..d])).collect();
        GridWavefunction {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        GridWavefunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| a * v).collect(),
        }
    }

    /// `i * self`.
    pub fn times_i(&self) -> Self {
        self.scaled(Complex64::i())
    }

    /// Pointwise product with a real table.
    pub fn multiplied(&self, table: &[f64]) -> Result<Self> {
        if table.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                found: table.len(),
            });
        }
        Ok(GridWavefunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(table)
                .map(|(&v, &w)| v * w)
                .collect(),
        })
    }

    /// Multiplication by the coordinate `x_axis`.
    pub fn times_coordinate(&self, axis: usize) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, &v)| v * self.grid.coordinate(idx, axis))
            .collect();
        GridWavefunction {
            grid: self.grid.clone(),
            values,
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: Complex64, other: &GridWavefunction) -> Result<()> {
        same_grid(self, other)?;
        for (s, &o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
        Ok(())
    }

    pub fn sub(&self, other: &GridWavefunction) -> Result<GridWavefunction> {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    pub fn add(&self, other: &GridWavefunction) -> Result<GridWavefunction> {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other)?;
        Ok(out)
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &GridWavefunction) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    pub fn max_abs_diff(&self, other: &GridWavefunction) -> Result<f64> {
        same_grid(self, other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

fn same_grid(u: &GridWavefunction, v: &GridWavefunction) -> Result<()> {
    if u.grid != v.grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `⟨u|v⟩ = h^d Σ conj(u_j) v_j`, antilinear in `u`.
pub fn inner(u: &GridWavefunction, v: &GridWavefunction) -> Result<Complex64> {
    same_grid(u, v)?;
    let sum: Complex64 = u
        .values
        .iter()
        .zip(&v.values)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum * u.grid.cell_volume())
}

/// Real part of the inner product: the metric `g`.
pub fn metric(u: &GridWavefunction, v: &GridWavefunction) -> Result<f64> {
    Ok(inner(u, v)?.re)
}

/// Imaginary part of the inner product: the symplectic form `ω`.
pub fn symplectic(u: &GridWavefunction, v: &GridWavefunction) -> Result<f64> {
    Ok(inner(u, v)?.im)
}

fn warn_unnormalized(u: &GridWavefunction) {
    let n = u.norm();
    if (n - 1.0).abs() > 1e-6 {
        log::warn!("moment requested for a state with norm {n:.8}");
    }
}

/// Position mean `⟨u|x_m u⟩` for every axis.
pub fn expectation_x(u: &GridWavefunction) -> Vec<f64> {
    warn_unnormalized(u);
    let g = u.grid();
    let w = g.cell_volume();
    (0..g.dim())
        .map(|axis| {
            w * u
                .values
                .iter()
                .enumerate()
                .map(|(idx, c)| c.norm_sqr() * g.coordinate(idx, axis))
                .sum::<f64>()
        })
        .collect()
}

/// Second moment `⟨x_m u|x_n u⟩`.
pub fn second_moment(u: &GridWavefunction, m: usize, n: usize) -> Result<f64> {
    let g = u.grid();
    let d = g.dim();
    if m >= d || n >= d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.max(n) + 1,
        });
    }
    warn_unnormalized(u);
    Ok(g.cell_volume()
        * u.values
            .iter()
            .enumerate()
            .map(|(idx, c)| c.norm_sqr() * g.coordinate(idx, m) * g.coordinate(idx, n))
            .sum::<f64>())
}

/// FFT plans and wavenumber tables for one grid.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral")
            .field("grid", &self.grid)
            .finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let m = grid.points();
        Spectral {
            grid: grid.clone(),
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
            k: grid.wavenumbers(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let m = self.grid.points();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        if self.grid.dim() == 2 {
            transpose_square(data, m);
            plan.process_with_scratch(data, &mut scratch);
            transpose_square(data, m);
        }
    }

    /// Unnormalized forward DFT in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fwd);
    }

    /// Inverse DFT in place, including the `1/M^d` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inv);
        let s = 1.0 / self.grid.len() as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }

    /// `Σ_m s_m k_m²` at every Fourier index; an empty `scale` means unit weights.
    pub fn kinetic_symbol(&self, scale: &[f64]) -> Vec<f64> {
        let s = |a: usize| scale.get(a).copied().unwrap_or(1.0);
        match self.grid.dim() {
            1 => self.k.iter().map(|k| s(0) * k * k).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.grid.len());
                for k1 in &self.k {
                    for k2 in &self.k {
                        out.push(s(0) * k1 * k1 + s(1) * k2 * k2);
                    }
                }
                out
            }
        }
    }

    /// Applies a diagonal Fourier multiplier to `values`.
    pub fn apply_symbol(&self, values: &[Complex64], symbol: &[Complex64]) -> Vec<Complex64> {
        let mut data = values.to_vec();
        self.forward(&mut data);
        for (v, s) in data.iter_mut().zip(symbol) {
            *v *= s;
        }
        self.inverse(&mut data);
        data
    }

    /// Weighted Laplacian `Σ_m s_m ∂²_m u`.
    pub fn laplacian(&self, u: &GridWavefunction, scale: &[f64]) -> Result<GridWavefunction> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let symbol: Vec<Complex64> = self
            .kinetic_symbol(scale)
            .into_iter()
            .map(|k2| Complex64::new(-k2, 0.0))
            .collect();
        GridWavefunction::new(self.grid.clone(), self.apply_symbol(u.values(), &symbol))
    }

    fn derivative_symbol(&self, axis: usize) -> Vec<Complex64> {
        let m = self.grid.points();
        // The Nyquist mode has no odd counterpart and is dropped.
        let ik = |j: usize| {
            if j == m / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, self.k[j])
            }
        };
        match self.grid.dim() {
            1 => (0..m).map(ik).collect(),
            _ => (0..self.grid.len())
                .map(|idx| if axis == 0 { ik(idx / m) } else { ik(idx % m) })
                .collect(),
        }
    }

    /// Spectral partial derivative `∂_axis u`.
    pub fn derivative(&self, u: &GridWavefunction, axis: usize) -> Result<GridWavefunction> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if axis >= self.grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                found: axis + 1,
            });
        }
        let symbol = self.derivative_symbol(axis);
        GridWavefunction::new(self.grid.clone(), self.apply_symbol(u.values(), &symbol))
    }

    /// Spectral derivative of a real periodic table.
    pub fn derivative_real(&self, table: &[f64], axis: usize) -> Vec<f64> {
        let data: Vec<Complex64> = table.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.apply_symbol(&data, &self.derivative_symbol(axis))
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    /// Momentum mean `-iħ⟨u|∂_m u⟩` per axis.
    pub fn momentum_expectation(&self, u: &GridWavefunction, hbar: f64) -> Result<Vec<f64>> {
        (0..self.grid.dim())
            .map(|axis| {
                let du = self.derivative(u, axis)?;
                Ok((Complex64::new(0.0, -hbar) * inner(u, &du)?).re)
            })
            .collect()
    }
}

fn transpose_square(data: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}
