//! Piecewise linear Galerkin method on the disk triangulation.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{LinearRecoverySystem, RecoveryMethod, SystemMatrix};
use crate::error::{Error, Result};
use crate::kernel::{Functional, Point};
use crate::linalg::{FactorizationReport, SpdSolver};
use crate::mesh::{DataVariant, DiskMesh};
use crate::recovery::RecoveryRow;

/// Load rule for nodal PDE data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeQuadrature {
    /// Average the three nodal values at the barycenter, then use the one-point rule.
    #[default]
    BarycenterAverage,
    /// Exact integral of the linear interpolant against each hat function.
    Consistent,
}

/// Stiffness matrix of the P1 hat functions over all vertices.
pub fn stiffness_matrix(mesh: &DiskMesh) -> DMatrix<f64> {
    let n = mesh.vertices.len();
    let mut s = DMatrix::zeros(n, n);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.signed_area(t);
        let p = tri.map(|i| mesh.vertices[i]);
        // gradients of the barycentric coordinates, scaled by 2*area
        let g: [[f64; 2]; 3] = std::array::from_fn(|k| {
            let a = p[(k + 1) % 3];
            let b = p[(k + 2) % 3];
            [a[1] - b[1], b[0] - a[0]]
        });
        for i in 0..3 {
            for j in 0..3 {
                s[(tri[i], tri[j])] += (g[i][0] * g[j][0] + g[i][1] * g[j][1]) / (4.0 * area);
            }
        }
    }
    s
}

/// Load matrix mapping PDE data at the variant's points to the vertex equations.
pub fn load_matrix(mesh: &DiskMesh, variant: DataVariant, quadrature: NodeQuadrature) -> DMatrix<f64> {
    let n = mesh.vertices.len();
    match variant {
        DataVariant::Bary => {
            let mut b = DMatrix::zeros(n, mesh.triangles.len());
            for (t, tri) in mesh.triangles.iter().enumerate() {
                let w = mesh.signed_area(t) / 3.0;
                for &i in tri {
                    b[(i, t)] += w;
                }
            }
            b
        }
        DataVariant::Node => {
            let mut b = DMatrix::zeros(n, n);
            for (t, tri) in mesh.triangles.iter().enumerate() {
                let area = mesh.signed_area(t);
                for &i in tri {
                    for &k in tri {
                        b[(i, k)] += match quadrature {
                            NodeQuadrature::BarycenterAverage => area / 9.0,
                            NodeQuadrature::Consistent => area / 12.0 * if i == k { 2.0 } else { 1.0 },
                        };
                    }
                }
            }
            b
        }
    }
}

pub struct FemSolver {
    name: String,
    mesh: DiskMesh,
    functionals: Arc<[Functional]>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    /// Position of each vertex among the interior (or boundary) unknowns.
    slot: Vec<usize>,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    solver: SpdSolver,
}

impl FemSolver {
    pub fn new(mesh: &DiskMesh, variant: DataVariant, quadrature: NodeQuadrature) -> Result<Self> {
        let interior = mesh.interior_indices();
        let boundary = mesh.boundary_indices();
        let mut slot = vec![0; mesh.vertices.len()];
        for (k, &i) in interior.iter().enumerate() {
            slot[i] = k;
        }
        for (k, &i) in boundary.iter().enumerate() {
            slot[i] = k;
        }
        let s = stiffness_matrix(mesh);
        let load = load_matrix(mesh, variant, quadrature);
        let a = s.select_rows(&interior).select_columns(&interior);
        let b = load.select_rows(&interior);
        let c = -s.select_rows(&interior).select_columns(&boundary);
        let solver = SpdSolver::factor(&a)?;
        Ok(Self {
            name: format!("FEM{}", variant.name()),
            mesh: mesh.clone(),
            functionals: mesh.point_sets(variant).functionals().into(),
            interior,
            boundary,
            slot,
            a,
            b,
            c,
            solver,
        })
    }
}

impl RecoveryMethod for FemSolver {
    fn method_name(&self) -> &str {
        &self.name
    }

    fn functionals(&self) -> &Arc<[Functional]> {
        &self.functionals
    }

    fn report(&self) -> FactorizationReport {
        self.solver.report
    }

    fn row_at(&self, x: Point) -> Result<RecoveryRow> {
        let (t, lambda) = self.mesh.locate(x).ok_or(Error::OutsideMesh(x[0], x[1]))?;
        let mut e = DVector::zeros(self.interior.len());
        let mut direct = DVector::zeros(self.boundary.len());
        for (&v, &l) in self.mesh.triangles[t].iter().zip(&lambda) {
            if self.mesh.boundary[v] {
                direct[self.slot[v]] += l;
            } else {
                e[self.slot[v]] += l;
            }
        }
        let y = self.solver.solve_vec(&e);
        let f_weights = self.b.tr_mul(&y);
        let g_weights = self.c.tr_mul(&y) + direct;
        let weights = DVector::from_iterator(
            f_weights.len() + g_weights.len(),
            f_weights.iter().chain(g_weights.iter()).copied(),
        );
        RecoveryRow::new(x, self.functionals.clone(), weights, self.solver.report)
    }

    fn system(&self) -> LinearRecoverySystem {
        LinearRecoverySystem {
            a: SystemMatrix::Dense(self.a.clone()),
            b: self.b.clone(),
            c: self.c.clone(),
            unknown_points: self.interior.iter().map(|&i| self.mesh.vertices[i]).collect(),
        }
    }
}

/// Galerkin row at `x` for the given data variant.
pub fn fem_recovery(mesh: &DiskMesh, x: Point, variant: DataVariant) -> Result<RecoveryRow> {
    FemSolver::new(mesh, variant, NodeQuadrature::default())?.row_at(x)
}
