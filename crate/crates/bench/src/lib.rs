//! Shared fixtures for the kernel benchmarks.

use varqd_core::{FrozenParams, GaussianSpec, Grid, HamiltonianSpec, HartreeState, PotentialModel};

pub fn quartic() -> HamiltonianSpec {
    HamiltonianSpec::new(1.0, PotentialModel::Quartic { k2: 1.0, k4: 0.1 }).unwrap()
}

/// Harmonic trap plus `0.5 x₁x₂`.
pub fn coupled_pair() -> HamiltonianSpec {
    HamiltonianSpec::new(
        1.0,
        PotentialModel::Sum(vec![
            PotentialModel::Harmonic { k: 1.0 },
            PotentialModel::pair(0.5),
        ]),
    )
    .unwrap()
}

pub fn grid(dim: usize, points: usize) -> Grid {
    Grid::new(dim, 20.0, points).unwrap()
}

pub fn packet(dim: usize) -> FrozenParams {
    FrozenParams::new(0.0, vec![1.0; dim], vec![0.5; dim], 0.75, 1.0).unwrap()
}

pub fn pair_state(points: usize) -> (Grid, HartreeState) {
    let g = Grid::new(1, 16.0, points).unwrap();
    let s = HartreeState::from_gaussians(
        &g,
        &[
            GaussianSpec::new(1.0, 0.5, 0.8),
            GaussianSpec::new(-0.5, -0.3, 1.0),
        ],
        1.0,
    )
    .unwrap();
    (g, s)
}
