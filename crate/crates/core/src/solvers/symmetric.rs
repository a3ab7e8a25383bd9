//! Symmetric (Hermite) kernel collocation.
//!
//! The trial space is spanned by the data functionals applied to one argument of the kernel,
//! so the system matrix is the Gram matrix of the data functionals. With the kernel of the
//! evaluation space this is the error-optimal recovery; with a fixed smoother kernel it is the
//! usual collocation method.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{LinearRecoverySystem, RecoveryMethod, SystemMatrix};
use crate::error::Result;
use crate::kernel::{Functional, Kernel, KernelSpec, Point};
use crate::linalg::FactorizationReport;
use crate::mesh::{DataVariant, DiskMesh};
use crate::recovery::{OptimalSolver, RecoveryRow};

pub struct SymmetricSolver {
    name: String,
    pde_count: usize,
    gram: DMatrix<f64>,
    points: Vec<Point>,
    solver: OptimalSolver,
}

impl SymmetricSolver {
    pub fn new(mesh: &DiskMesh, variant: DataVariant, spec: KernelSpec) -> Result<Self> {
        let sets = mesh.point_sets(variant);
        let functionals: Arc<[Functional]> = sets.functionals().into();
        let kernel = Kernel::new(spec);
        kernel.check_admissible(&functionals)?;
        let (pde, bnd) = functionals.split_at(sets.pde.len());
        let lap = kernel.cross_matrix(pde, pde)?;
        let mixed = kernel.cross_matrix(pde, bnd)?;
        let values = kernel.cross_matrix(bnd, bnd)?;
        let n = functionals.len();
        let p = pde.len();
        let mut gram = DMatrix::zeros(n, n);
        gram.view_mut((0, 0), (p, p)).copy_from(&lap);
        gram.view_mut((0, p), (p, n - p)).copy_from(&mixed);
        gram.view_mut((p, 0), (n - p, p)).copy_from(&mixed.transpose());
        gram.view_mut((p, p), (n - p, n - p)).copy_from(&values);
        let solver = OptimalSolver::from_gram(kernel, functionals.clone(), &gram)?;
        Ok(Self {
            name: format!("HO{}", variant.name()),
            pde_count: p,
            gram,
            points: functionals.iter().map(Functional::point).collect(),
            solver,
        })
    }

    pub fn solver(&self) -> &OptimalSolver {
        &self.solver
    }
}

impl RecoveryMethod for SymmetricSolver {
    fn method_name(&self) -> &str {
        &self.name
    }

    fn functionals(&self) -> &Arc<[Functional]> {
        self.solver.functionals()
    }

    fn report(&self) -> FactorizationReport {
        self.solver.report()
    }

    fn row_at(&self, x: Point) -> Result<RecoveryRow> {
        self.solver.row_at(x)
    }

    fn system(&self) -> LinearRecoverySystem {
        let n = self.gram.nrows();
        let p = self.pde_count;
        LinearRecoverySystem {
            a: SystemMatrix::Dense(self.gram.clone()),
            b: DMatrix::from_fn(n, p, |i, j| if i == j { 1.0 } else { 0.0 }),
            c: DMatrix::from_fn(n, n - p, |i, j| if i == p + j { 1.0 } else { 0.0 }),
            unknown_points: self.points.clone(),
        }
    }
}

/// Collocation row at `x` with the construction kernel `spec`.
pub fn symmetric_collocation_recovery(mesh: &DiskMesh, x: Point, variant: DataVariant, spec: &KernelSpec) -> Result<RecoveryRow> {
    SymmetricSolver::new(mesh, variant, *spec)?.row_at(x)
}
