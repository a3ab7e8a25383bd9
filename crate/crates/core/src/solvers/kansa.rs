//! Unsymmetric kernel collocation with translates at a fixed center set.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{LinearRecoverySystem, RecoveryMethod, SystemMatrix};
use crate::error::{Error, Result};
use crate::kernel::{Functional, Kernel, KernelSpec, Point};
use crate::linalg::{FactorizationReport, PseudoInverse};
use crate::mesh::{DataVariant, DiskMesh};
use crate::recovery::RecoveryRow;

pub struct KansaSolver {
    name: String,
    kernel: Kernel,
    functionals: Arc<[Functional]>,
    centers: Vec<Functional>,
    a: DMatrix<f64>,
    pde_count: usize,
    pinv: PseudoInverse,
}

impl KansaSolver {
    /// Collocate the data functionals of `variant` on translates `K(., z)`, `z` in `centers`.
    pub fn new(mesh: &DiskMesh, variant: DataVariant, spec: KernelSpec, centers: &[Point], tol: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::DimensionMismatch("no trial centers".into()));
        }
        let sets = mesh.point_sets(variant);
        let functionals: Arc<[Functional]> = sets.functionals().into();
        let kernel = Kernel::new(spec);
        let centers: Vec<Functional> = centers.iter().map(|&z| Functional::Eval(z)).collect();
        let a = kernel.cross_matrix(&functionals, &centers)?;
        let pinv = PseudoInverse::new(&a, tol)?;
        Ok(Self {
            name: format!("Kansa{}", variant.name()),
            kernel,
            functionals,
            centers,
            a,
            pde_count: sets.pde.len(),
            pinv,
        })
    }

    pub fn collocation_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl RecoveryMethod for KansaSolver {
    fn method_name(&self) -> &str {
        &self.name
    }

    fn functionals(&self) -> &Arc<[Functional]> {
        &self.functionals
    }

    fn report(&self) -> FactorizationReport {
        self.pinv.report
    }

    fn row_at(&self, x: Point) -> Result<RecoveryRow> {
        let k = self.kernel.cross_vector(x, &self.centers)?;
        RecoveryRow::new(x, self.functionals.clone(), self.pinv.apply_transpose(&k), self.pinv.report)
    }

    fn system(&self) -> LinearRecoverySystem {
        let n = self.a.nrows();
        let p = self.pde_count;
        LinearRecoverySystem {
            a: SystemMatrix::Dense(self.a.clone()),
            b: DMatrix::from_fn(n, p, |i, j| if i == j { 1.0 } else { 0.0 }),
            c: DMatrix::from_fn(n, n - p, |i, j| if i == p + j { 1.0 } else { 0.0 }),
            unknown_points: self.centers.iter().map(Functional::point).collect(),
        }
    }
}

/// Kansa row at `x` with all mesh vertices as centers.
pub fn kansa_recovery(mesh: &DiskMesh, x: Point, variant: DataVariant, spec: &KernelSpec, tol: f64) -> Result<RecoveryRow> {
    KansaSolver::new(mesh, variant, *spec, &mesh.vertices, tol)?.row_at(x)
}

/// Coefficients of the trial function for data `d`, exposed for diagnostics.
pub fn kansa_coefficients(solver: &KansaSolver, data: &DVector<f64>) -> DVector<f64> {
    let d = DMatrix::from_column_slice(data.len(), 1, data.as_slice());
    solver.pinv.apply(&d).column(0).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::disk_case;
    use crate::recovery::error_norm;

    #[test]
    fn square_system_matches_direct_solve() {
        // Node data on C0: 9 PDE rows + 8 boundary rows against 17 centers
        let mesh = disk_case(0);
        let spec = KernelSpec::sobolev(7).unwrap();
        let sets = mesh.point_sets(DataVariant::Node);
        let mut centers = mesh.vertices.clone();
        centers.extend(sets.boundary.iter().map(|p| [1.3 * p[0], 1.3 * p[1]]));
        let s = KansaSolver::new(&mesh, DataVariant::Node, spec, &centers, 1e-14).unwrap();
        assert_eq!(s.collocation_matrix().nrows(), s.collocation_matrix().ncols());
        let x = [0.2, 0.1];
        let row = s.row_at(x).unwrap();
        let k = s.kernel.cross_vector(x, &s.centers).unwrap();
        let direct = s.collocation_matrix().transpose().lu().solve(&k).unwrap();
        assert!((&row.weights - &direct).norm() <= 1e-9 * direct.norm(), "{:e}", (&row.weights - &direct).norm() / direct.norm());
    }

    #[test]
    fn weights_lie_in_the_range_of_the_collocation_matrix() {
        let mesh = disk_case(1);
        let spec = KernelSpec::sobolev(5).unwrap();
        let s = KansaSolver::new(&mesh, DataVariant::Bary, spec, &mesh.vertices, 1e-10).unwrap();
        let w = s.row_at([0.1, -0.3]).unwrap().weights;
        let a = s.collocation_matrix();
        let projected = a * s.pinv.apply(&DMatrix::from_column_slice(w.len(), 1, w.as_slice()));
        assert!((projected.column(0) - &w).amax() < 1e-8 * w.amax());
        assert!(error_norm(&spec, &s.row_at([0.1, -0.3]).unwrap()).unwrap().is_finite());
    }

    #[test]
    fn coefficients_reproduce_data_in_least_squares_sense() {
        let mesh = disk_case(0);
        let s = KansaSolver::new(&mesh, DataVariant::Bary, KernelSpec::sobolev(6).unwrap(), &mesh.vertices, 1e-12).unwrap();
        let data = DVector::from_fn(s.functionals.len(), |i, _| (i as f64).sin());
        let a = kansa_coefficients(&s, &data);
        let residual = s.collocation_matrix() * &a - &data;
        // normal equations hold for the minimum-norm least-squares solution
        assert!((s.collocation_matrix().transpose() * residual).amax() < 1e-6);
    }
}
