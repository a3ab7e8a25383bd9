//! Local kernel-based finite differences on the mesh vertices.
//!
//! Each interior vertex gets a stencil of its nearest vertices and weights that are optimal
//! for `-Delta u` at that vertex in the construction kernel's space. The stencils form a sparse
//! square system for the interior values.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{LinearRecoverySystem, RecoveryMethod, SystemMatrix};
use crate::error::{Error, Result};
use crate::kernel::{distance, Functional, Kernel, KernelSpec, Operator, Point};
use crate::linalg::{CsrMatrix, FactorizationReport, LuSolver, SpdSolver};
use crate::mesh::{DataVariant, DiskMesh};
use crate::recovery::RecoveryRow;

/// Indices of the `size` vertices nearest to `center`, ties broken by index.
pub fn nearest_vertices(vertices: &[Point], center: Point, size: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    idx.sort_by(|&a, &b| {
        distance(vertices[a], center)
            .total_cmp(&distance(vertices[b], center))
            .then(a.cmp(&b))
    });
    idx.truncate(size);
    idx
}

/// Stencil weights `alpha` with `-Delta u(center) ~ sum alpha_k u(z_k)`.
pub fn stencil_weights(kernel: &Kernel, center: Point, stencil: &[Point]) -> Result<(DVector<f64>, FactorizationReport)> {
    let evals: Vec<Functional> = stencil.iter().map(|&z| Functional::Eval(z)).collect();
    let gram = kernel.gram_matrix(&evals)?;
    let rhs = kernel.cross_matrix(&[Functional::Apply(Operator::MinusLaplacian, center)], &evals)?;
    let solver = SpdSolver::factor(&gram)?;
    Ok((solver.solve_vec(&rhs.row(0).transpose()), solver.report))
}

pub struct GfdSolver {
    mesh: DiskMesh,
    functionals: Arc<[Functional]>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    slot: Vec<usize>,
    stencils: Vec<Vec<(usize, f64)>>,
    a: CsrMatrix,
    c: DMatrix<f64>,
    lu: LuSolver,
    report: FactorizationReport,
}

impl GfdSolver {
    pub fn new(mesh: &DiskMesh, spec: KernelSpec, bandwidth: usize) -> Result<Self> {
        if bandwidth == 0 {
            return Err(Error::Config("stencil bandwidth must be positive".into()));
        }
        let kernel = Kernel::new(spec);
        kernel.check_admissible(&[Functional::Apply(Operator::MinusLaplacian, [0.0, 0.0])])?;
        let interior = mesh.interior_indices();
        let boundary = mesh.boundary_indices();
        let mut slot = vec![0; mesh.vertices.len()];
        for (k, &i) in interior.iter().enumerate() {
            slot[i] = k;
        }
        for (k, &i) in boundary.iter().enumerate() {
            slot[i] = k;
        }
        let size = bandwidth.min(mesh.vertices.len());
        let mut stencils = Vec::with_capacity(interior.len());
        let mut worst_local: Option<FactorizationReport> = None;
        for &j in &interior {
            let center = mesh.vertices[j];
            let idx = nearest_vertices(&mesh.vertices, center, size);
            let pts: Vec<Point> = idx.iter().map(|&i| mesh.vertices[i]).collect();
            let (alpha, rep) = stencil_weights(&kernel, center, &pts)?;
            if worst_local.is_none_or(|w| rep.condition_estimate > w.condition_estimate) {
                worst_local = Some(rep);
            }
            stencils.push(idx.into_iter().zip(alpha.iter().copied()).collect::<Vec<_>>());
        }
        let mut rows = Vec::with_capacity(interior.len());
        let mut c = DMatrix::zeros(interior.len(), boundary.len());
        for (r, st) in stencils.iter().enumerate() {
            let mut row = Vec::new();
            for &(v, w) in st {
                if mesh.boundary[v] {
                    c[(r, slot[v])] -= w;
                } else {
                    row.push((slot[v], w));
                }
            }
            rows.push(row);
        }
        let a = CsrMatrix::from_rows(interior.len(), &rows);
        let lu = LuSolver::factor(&a.to_dense())?;
        let mut report = lu.report;
        if let Some(w) = worst_local {
            report.jitter_used = w.jitter_used;
        }
        Ok(Self {
            mesh: mesh.clone(),
            functionals: mesh.point_sets(DataVariant::Node).functionals().into(),
            interior,
            boundary,
            slot,
            stencils,
            a,
            c,
            lu,
            report,
        })
    }

    /// Stencil of the `k`-th interior vertex as `(vertex, weight)` pairs.
    pub fn stencil(&self, k: usize) -> &[(usize, f64)] {
        &self.stencils[k]
    }

    pub fn stencil_count(&self) -> usize {
        self.stencils.len()
    }

    /// `|sum alpha| / ||alpha||` of one stencil, which vanishes when constants are annihilated.
    pub fn relative_row_sum(&self, k: usize) -> f64 {
        let st = &self.stencils[k];
        let sum: f64 = st.iter().map(|&(_, w)| w).sum();
        let norm = st.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        sum.abs() / norm
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.a
    }
}

impl RecoveryMethod for GfdSolver {
    fn method_name(&self) -> &str {
        "LocNode"
    }

    fn functionals(&self) -> &Arc<[Functional]> {
        &self.functionals
    }

    fn report(&self) -> FactorizationReport {
        self.report
    }

    fn row_at(&self, x: Point) -> Result<RecoveryRow> {
        let (t, lambda) = self.mesh.locate(x).ok_or(Error::OutsideMesh(x[0], x[1]))?;
        let mut e = DVector::zeros(self.interior.len());
        let n = self.mesh.vertices.len();
        let mut weights = DVector::zeros(n + self.boundary.len());
        for (&v, &l) in self.mesh.triangles[t].iter().zip(&lambda) {
            if self.mesh.boundary[v] {
                weights[n + self.slot[v]] += l;
            } else {
                e[self.slot[v]] += l;
            }
        }
        let y = self.lu.solve_transpose(&e);
        // PDE data enters only at interior vertices
        for (k, &v) in self.interior.iter().enumerate() {
            weights[v] += y[k];
        }
        let g = self.c.tr_mul(&y);
        for k in 0..self.boundary.len() {
            weights[n + k] += g[k];
        }
        RecoveryRow::new(x, self.functionals.clone(), weights, self.report)
    }

    fn system(&self) -> LinearRecoverySystem {
        let n = self.mesh.vertices.len();
        LinearRecoverySystem {
            a: SystemMatrix::Sparse(self.a.clone()),
            b: DMatrix::from_fn(self.interior.len(), n, |r, v| if self.interior[r] == v { 1.0 } else { 0.0 }),
            c: self.c.clone(),
            unknown_points: self.interior.iter().map(|&i| self.mesh.vertices[i]).collect(),
        }
    }
}

/// Local stencil row at `x` with `bandwidth` neighbours per stencil.
pub fn gfd_local_recovery(mesh: &DiskMesh, x: Point, spec: &KernelSpec, bandwidth: usize) -> Result<RecoveryRow> {
    GfdSolver::new(mesh, *spec, bandwidth)?.row_at(x)
}
