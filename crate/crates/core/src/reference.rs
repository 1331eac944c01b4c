//! Strang split-step Fourier propagation of the full Schrödinger equation.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridWavefunction, Spectral};
use crate::operators::HamiltonianSpec;
use crate::propagate::times_match;

/// Snapshots of a split-step run.
#[derive(Debug, Clone)]
pub struct ReferenceRun {
    pub grid: Grid,
    pub hbar: f64,
    pub dt: f64,
    pub snapshots: Vec<(f64, GridWavefunction)>,
}

impl ReferenceRun {
    pub fn has_snapshot(&self, t: f64) -> bool {
        self.snapshots.iter().any(|(s, _)| times_match(*s, t))
    }

    pub fn snapshot_at(&self, t: f64) -> Result<&GridWavefunction> {
        self.snapshots
            .iter()
            .find(|(s, _)| times_match(*s, t))
            .map(|(_, psi)| psi)
            .ok_or(Error::MissingSnapshot(t))
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|(t, _)| *t).collect()
    }

    pub fn final_state(&self) -> &GridWavefunction {
        &self
            .snapshots
            .last()
            .expect("runs keep the initial snapshot")
            .1
    }
}

/// Kinetic phase `dt ħ k_max² / 2` per step (scaled by the largest kinetic factor).
pub fn kinetic_phase(grid: &Grid, h: &HamiltonianSpec, dt: f64) -> f64 {
    let s = (0..grid.dim()).map(|m| h.scale(m)).fold(0.0, f64::max);
    let k = grid.k_max();
    0.5 * dt * h.hbar * s * k * k * grid.dim() as f64
}

/// Split-step propagation; a kinetic phase above π/4 is logged as a warning.
pub fn split_step(
    psi0: &GridWavefunction,
    h: &HamiltonianSpec,
    dt: f64,
    steps: usize,
    sample_every: usize,
) -> Result<ReferenceRun> {
    split_step_with(psi0, h, dt, steps, sample_every, false)
}

/// As [`split_step`]; with `strict` the stability threshold is an error.
pub fn split_step_with(
    psi0: &GridWavefunction,
    h: &HamiltonianSpec,
    dt: f64,
    steps: usize,
    sample_every: usize,
    strict: bool,
) -> Result<ReferenceRun> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("reference.dt", "must be positive"));
    }
    if sample_every == 0 {
        return Err(Error::param(
            "reference.sample_interval",
            "must be at least 1",
        ));
    }
    let grid = psi0.grid().clone();
    let phase = kinetic_phase(&grid, h, dt);
    if phase >= FRAC_PI_4 {
        if strict {
            return Err(Error::Stability { phase });
        }
        log::warn!("split-step kinetic phase {phase:.3} exceeds pi/4; refine dt");
    }
    let spectral = Spectral::new(&grid);
    let v = h.potential.tabulate(&grid)?;
    let hbar = h.hbar;
    let half_potential: Vec<Complex64> = v
        .iter()
        .map(|v| Complex64::from_polar(1.0, -0.5 * v * dt / hbar))
        .collect();
    let kinetic: Vec<Complex64> = spectral
        .kinetic_symbol(&h.kinetic_scale)
        .into_iter()
        .map(|k2| Complex64::from_polar(1.0, -0.5 * hbar * k2 * dt))
        .collect();
    let mut psi = psi0.values().to_vec();
    let mut snapshots = vec![(0.0, psi0.clone())];
    for step in 1..=steps {
        for (c, f) in psi.iter_mut().zip(&half_potential) {
            *c *= f;
        }
        spectral.forward(&mut psi);
        for (c, f) in psi.iter_mut().zip(&kinetic) {
            *c *= f;
        }
        spectral.inverse(&mut psi);
        for (c, f) in psi.iter_mut().zip(&half_potential) {
            *c *= f;
        }
        if step % sample_every == 0 || step == steps {
            snapshots.push((
                step as f64 * dt,
                GridWavefunction::new(grid.clone(), psi.clone())?,
            ));
        }
    }
    Ok(ReferenceRun {
        grid,
        hbar,
        dt,
        snapshots,
    })
}

/// `‖u - ψ(t)‖` against the snapshot at `t`.
pub fn true_error(u: &GridWavefunction, run: &ReferenceRun, t: f64) -> Result<f64> {
    let psi = run.snapshot_at(t)?;
    if u.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    u.distance(psi)
}

/// Norm carried by the upper half of the resolved wavenumbers on any axis,
/// a proxy for spatial truncation error.
pub fn spectral_tail(psi: &GridWavefunction) -> f64 {
    let grid = psi.grid();
    let spectral = Spectral::new(grid);
    let mut data = psi.values().to_vec();
    spectral.forward(&mut data);
    let k = grid.wavenumbers();
    let cut = 0.5 * grid.k_max();
    let m = grid.points();
    let mut tail = 0.0;
    let mut total = 0.0;
    for (idx, c) in data.iter().enumerate() {
        let high = match grid.dim() {
            1 => k[idx].abs() > cut,
            _ => k[idx / m].abs() > cut || k[idx % m].abs() > cut,
        };
        let w = c.norm_sqr();
        total += w;
        if high {
            tail += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (tail / total).sqrt() * psi.norm()
    }
}
