//! Real-linear tangent spaces and the metric / symplectic projections onto them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{inner, GridWavefunction};

/// Gram condition numbers above this are treated as degenerate.
pub const DEFAULT_CONDITION_THRESHOLD: f64 = 1e10;

/// Labeled vectors spanning a real-linear subspace of the grid space.
#[derive(Debug, Clone)]
pub struct TangentBasis {
    vectors: Vec<GridWavefunction>,
    labels: Vec<String>,
}

/// Real coefficients of a projection and the projected vector.
#[derive(Debug, Clone)]
pub struct Projection {
    pub coefficients: Vec<f64>,
    pub projected: GridWavefunction,
}

impl TangentBasis {
    pub fn new(vectors: Vec<GridWavefunction>, labels: Vec<String>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::param("basis", "needs at least one vector"));
        }
        if labels.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                found: labels.len(),
            });
        }
        if vectors.iter().any(|v| v.grid() != vectors[0].grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(TangentBasis { vectors, labels })
    }

    /// Basis with labels `v0, v1, ...`.
    pub fn unlabeled(vectors: Vec<GridWavefunction>) -> Result<Self> {
        let labels = (0..vectors.len()).map(|i| format!("v{i}")).collect();
        Self::new(vectors, labels)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[GridWavefunction] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn hermitian(&self) -> Result<DMatrix<Complex64>> {
        let n = self.len();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let z = inner(&self.vectors[i], &self.vectors[j])?;
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        Ok(h)
    }

    /// `G_ij = Re⟨v_i|v_j⟩`.
    pub fn gram(&self) -> Result<DMatrix<f64>> {
        Ok(self.hermitian()?.map(|z| z.re))
    }

    /// `Ω_ij = Im⟨v_i|v_j⟩`.
    pub fn symplectic_matrix(&self) -> Result<DMatrix<f64>> {
        Ok(self.hermitian()?.map(|z| z.im))
    }

    /// Spectral condition number of the Gram matrix.
    pub fn gram_condition(&self) -> Result<f64> {
        Ok(condition(&self.gram()?))
    }

    fn loads(&self, w: &GridWavefunction) -> Result<Vec<Complex64>> {
        if w.grid() != self.vectors[0].grid() {
            return Err(Error::GridMismatch);
        }
        self.vectors.iter().map(|v| inner(v, w)).collect()
    }

    /// `Σ c_i v_i` for real coefficients.
    pub fn combine(&self, c: &[f64]) -> Result<GridWavefunction> {
        if c.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: c.len(),
            });
        }
        let mut out = GridWavefunction::zeros(self.vectors[0].grid());
        for (ci, v) in c.iter().zip(&self.vectors) {
            out.axpy(Complex64::new(*ci, 0.0), v)?;
        }
        Ok(out)
    }

    /// `Σ c_i v_i` for complex coefficients.
    pub fn combine_complex(&self, c: &[Complex64]) -> Result<GridWavefunction> {
        let mut out = GridWavefunction::zeros(self.vectors[0].grid());
        for (ci, v) in c.iter().zip(&self.vectors) {
            out.axpy(*ci, v)?;
        }
        Ok(out)
    }
}

fn condition(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Metric (McLachlan) projection with the default conditioning threshold.
pub fn project_metric(basis: &TangentBasis, w: &GridWavefunction) -> Result<Projection> {
    project_metric_with(basis, w, DEFAULT_CONDITION_THRESHOLD)
}

/// Solves `G c = r`, `r_i = Re⟨v_i|w⟩`, by Cholesky.
pub fn project_metric_with(
    basis: &TangentBasis,
    w: &GridWavefunction,
    threshold: f64,
) -> Result<Projection> {
    let g = basis.gram()?;
    let cond = condition(&g);
    if !(cond < threshold) {
        return Err(Error::DegenerateBasis {
            condition: cond,
            threshold,
        });
    }
    let r = DVector::from_iterator(basis.len(), basis.loads(w)?.into_iter().map(|z| z.re));
    let chol = g.cholesky().ok_or(Error::DegenerateBasis {
        condition: cond,
        threshold,
    })?;
    let c: Vec<f64> = chol.solve(&r).iter().copied().collect();
    let projected = basis.combine(&c)?;
    Ok(Projection {
        coefficients: c,
        projected,
    })
}

/// Symplectic (Kramer–Saraceno) projection with the default threshold.
pub fn project_symplectic(basis: &TangentBasis, w: &GridWavefunction) -> Result<Projection> {
    project_symplectic_with(basis, w, DEFAULT_CONDITION_THRESHOLD)
}

/// Solves `Ω c = s`, `s_i = Im⟨v_i|w⟩`, by LU with partial pivoting.
pub fn project_symplectic_with(
    basis: &TangentBasis,
    w: &GridWavefunction,
    threshold: f64,
) -> Result<Projection> {
    let omega = basis.symplectic_matrix()?;
    let cond = condition(&omega);
    if !(cond < threshold) {
        return Err(Error::DegenerateSymplectic { condition: cond });
    }
    let s = DVector::from_iterator(basis.len(), basis.loads(w)?.into_iter().map(|z| z.im));
    let c: Vec<f64> = omega
        .lu()
        .solve(&s)
        .ok_or(Error::DegenerateSymplectic { condition: cond })?
        .iter()
        .copied()
        .collect();
    let projected = basis.combine(&c)?;
    Ok(Projection {
        coefficients: c,
        projected,
    })
}

/// Orthogonal projection onto the complex span of `basis` (Dirac–Frenkel).
pub fn project_complex(basis: &TangentBasis, w: &GridWavefunction) -> Result<GridWavefunction> {
    let h = basis.hermitian()?;
    let cond = condition(&h.map(|z| z.norm()));
    let rhs = DVector::from_vec(basis.loads(w)?);
    let c = h.lu().solve(&rhs).ok_or(Error::DegenerateBasis {
        condition: cond,
        threshold: DEFAULT_CONDITION_THRESHOLD,
    })?;
    basis.combine_complex(c.as_slice())
}

/// `‖w − P^g w‖`.
pub fn residual_distance(basis: &TangentBasis, w: &GridWavefunction) -> Result<f64> {
    let p = project_metric(basis, w)?;
    w.distance(&p.projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{metric, symplectic, Grid};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::new(1, 20.0, 128).unwrap()
    }

    fn packet(g: &Grid, c: f64, k: f64, w: f64) -> GridWavefunction {
        let n = (2.0 * std::f64::consts::PI * w * w).powf(-0.25);
        GridWavefunction::from_fn(g, |x| {
            let y = x[0] - c;
            Complex64::new(-y * y / (4.0 * w * w), k * y).exp() * n
        })
    }

    fn random_target(g: &Grid, rng: &mut impl Rng) -> GridWavefunction {
        let mut w = GridWavefunction::zeros(g);
        for _ in 0..3 {
            let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let p = packet(
                g,
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.5..1.5),
            );
            w.axpy(a, &p).unwrap();
        }
        w
    }

    #[test]
    fn metric_projection_examples() {
        let g = grid();
        let u = packet(&g, 0.0, 0.3, 1.0);
        let basis = TangentBasis::unlabeled(vec![u.clone()]).unwrap();
        let p = project_metric(&basis, &u.scaled(2.5.into())).unwrap();
        assert!((p.coefficients[0] - 2.5).abs() < 1e-12);
        let p = project_metric(&basis, &u.times_i()).unwrap();
        assert!(p.coefficients[0].abs() < 1e-12);
        assert!((residual_distance(&basis, &u.times_i()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn metric_projection_matches_normal_equations() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vs = vec![
            packet(&g, -1.0, 0.2, 0.8),
            packet(&g, 0.5, -0.4, 1.0),
            packet(&g, 1.5, 0.7, 1.2),
        ];
        let basis = TangentBasis::unlabeled(vs.clone()).unwrap();
        let w = random_target(&g, &mut rng);
        let p = project_metric(&basis, &w).unwrap();
        // Dense real least squares on stacked (Re, Im) samples.
        let rows = 2 * g.len();
        let sq = g.cell_volume().sqrt();
        let a = DMatrix::from_fn(rows, 3, |r, c| {
            let z = vs[c].values()[r / 2] * sq;
            if r % 2 == 0 {
                z.re
            } else {
                z.im
            }
        });
        let b = DVector::from_fn(rows, |r, _| {
            let z = w.values()[r / 2] * sq;
            if r % 2 == 0 {
                z.re
            } else {
                z.im
            }
        });
        let oracle = (a.transpose() * &a)
            .lu()
            .solve(&(a.transpose() * b))
            .unwrap();
        for i in 0..3 {
            assert!((p.coefficients[i] - oracle[i]).abs() < 1e-9);
        }
        let pyth = (w.norm_sqr() - p.projected.norm_sqr()).sqrt();
        assert!((residual_distance(&basis, &w).unwrap() - pyth).abs() < 1e-10);
    }

    #[test]
    fn symplectic_examples() {
        let g = grid();
        let u = packet(&g, 0.3, 0.1, 0.9);
        let single = TangentBasis::unlabeled(vec![u.clone()]).unwrap();
        assert!(matches!(
            project_symplectic(&single, &u),
            Err(Error::DegenerateSymplectic { .. })
        ));
        let basis = TangentBasis::unlabeled(vec![u.clone(), u.times_i()]).unwrap();
        let omega = basis.symplectic_matrix().unwrap();
        assert!((omega[(0, 1)] - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = random_target(&g, &mut rng);
        let p = project_symplectic(&basis, &w).unwrap();
        // Ω = [[0, 1], [-1, 0]]: c1 = Im⟨iu|w⟩ · (-1), c0 = Im⟨u|w⟩.
        let s0 = inner(&u, &w).unwrap().im;
        let s1 = inner(&u.times_i(), &w).unwrap().im;
        assert!((p.coefficients[1] - s0).abs() < 1e-10);
        assert!((p.coefficients[0] + s1).abs() < 1e-10);
        let res = w.sub(&p.projected).unwrap();
        for v in basis.vectors() {
            assert!(symplectic(v, &res).unwrap().abs() < 1e-10 * w.norm());
        }
    }

    #[test]
    fn projections_coincide_on_complex_linear_spans() {
        let g = grid();
        let u = packet(&g, 0.3, 0.1, 0.9);
        let xu = u.times_coordinate(0);
        let real = TangentBasis::unlabeled(vec![u.clone(), u.times_i(), xu.clone(), xu.times_i()])
            .unwrap();
        let cplx = TangentBasis::unlabeled(vec![u, xu]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let w = random_target(&g, &mut rng);
            let pg = project_metric(&real, &w).unwrap().projected;
            let pw = project_symplectic(&real, &w).unwrap().projected;
            let pc = project_complex(&cplx, &w).unwrap();
            assert!(pg.distance(&pw).unwrap() < 1e-10);
            assert!(pg.distance(&pc).unwrap() < 1e-10);
        }
    }

    #[test]
    fn ill_conditioned_basis_is_rejected() {
        let g = grid();
        let u = packet(&g, 0.0, 0.0, 1.0);
        let basis = TangentBasis::unlabeled(vec![u.clone(), u.scaled(2.0.into())]).unwrap();
        assert!(matches!(
            project_metric(&basis, &u),
            Err(Error::DegenerateBasis { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn projection_properties(seed in 0u64..1000) {
            let g = grid();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = packet(&g, rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.6..1.2));
            let xu = u.times_coordinate(0);
            let x2u = xu.times_coordinate(0);
            let basis = TangentBasis::unlabeled(vec![
                xu.times_i(),
                xu,
                x2u.times_i(),
                x2u.times_coordinate(0),
            ]).unwrap();
            let w = random_target(&g, &mut rng);
            let pg = project_metric(&basis, &w).unwrap();
            let pw = project_symplectic(&basis, &w).unwrap();

            // idempotence
            let again = project_metric(&basis, &pg.projected).unwrap();
            for (a, b) in again.coefficients.iter().zip(&pg.coefficients) {
                prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
            }
            let again = project_symplectic(&basis, &pw.projected).unwrap();
            for (a, b) in again.coefficients.iter().zip(&pw.coefficients) {
                prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
            }

            // orthogonality of residuals
            let rg = w.sub(&pg.projected).unwrap();
            let rw = w.sub(&pw.projected).unwrap();
            for v in basis.vectors() {
                prop_assert!(metric(v, &rg).unwrap().abs() <= 1e-10 * w.norm());
                prop_assert!(symplectic(v, &rw).unwrap().abs() <= 1e-10 * w.norm());
            }

            // minimality
            let best = rg.norm();
            for _ in 0..100 {
                let c: Vec<f64> = pg.coefficients.iter().map(|c| c + rng.gen_range(-0.5..0.5)).collect();
                let trial = basis.combine(&c).unwrap();
                prop_assert!(trial.distance(&w).unwrap() >= best - 1e-12);
            }
        }
    }
}
