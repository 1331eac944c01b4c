//! Variational quantum dynamics on frozen Gaussian and Hartree-product manifolds,
//! with a-posteriori error certificates checked against a split-step reference.
//!
//! The crate is organized bottom-up: [`grid`] holds the discretized Hilbert
//! space, [`operators`] the Hamiltonians, [`tangent`] the generic projections,
//! [`frozen`] and [`hartree`] the two manifolds, [`propagate`] the integrators
//! and certificates, and [`reference`] the split-step truth solver.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops over coordinate axes read closer to the formulas
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod frozen;
pub mod grid;
pub mod hartree;
pub mod operators;
pub mod propagate;
pub mod reference;
pub mod tangent;

pub use error::{Error, Result};
pub use frozen::{FrozenDerivative, FrozenModel, FrozenParams, Principle};
pub use grid::{Grid, GridWavefunction, Spectral};
pub use hartree::{GaussianSpec, HartreeDerivative, HartreeModel, HartreeState};
pub use operators::{GridHamiltonian, HamiltonianSpec, PotentialModel, TabulatedPotential};
pub use propagate::{
    CertificateReport, IntegratorConfig, Method, Observation, SlackModel, TrajectoryRecord,
};
pub use reference::ReferenceRun;
pub use tangent::{Projection, TangentBasis};

pub use num_complex::Complex64;
