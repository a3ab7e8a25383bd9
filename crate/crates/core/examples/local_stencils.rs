//! Local kernel stencils for the Laplacian: accuracy and conditioning per case.

use pde_recovery::recovery::error_norm;
use pde_recovery::solvers::gfd::{nearest_vertices, stencil_weights};
use pde_recovery::solvers::{GfdSolver, RecoveryMethod};
use pde_recovery::{disk_case, Kernel, KernelSpec};

fn main() -> pde_recovery::Result<()> {
    let construction = KernelSpec::sobolev(7)?;
    let kernel = Kernel::new(construction);
    for level in 0..4 {
        let mesh = disk_case(level);
        let (mut constant, mut quadratic, mut cond) = (0.0f64, 0.0f64, 0.0f64);
        for &j in &mesh.interior_indices() {
            let c = mesh.vertices[j];
            let pts: Vec<_> = nearest_vertices(&mesh.vertices, c, 15).into_iter().map(|i| mesh.vertices[i]).collect();
            let (alpha, report) = stencil_weights(&kernel, c, &pts)?;
            let sum: f64 = alpha.iter().sum();
            // -Delta |x - c|^2 = -4
            let q: f64 = pts
                .iter()
                .zip(alpha.iter())
                .map(|(p, w)| w * ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)))
                .sum();
            constant = constant.max(sum.abs() / alpha.norm());
            quadratic = quadratic.max((q + 4.0).abs() / 4.0);
            cond = cond.max(report.condition_estimate);
        }
        let solver = GfdSolver::new(&mesh, construction, 15)?;
        let row = solver.row_at([0.0, 0.0])?;
        println!(
            "C{level}: constant defect {constant:.2e}, quadratic defect {quadratic:.2e}, local condition {cond:.1e}, order-4 error {:.4e}",
            error_norm(&KernelSpec::sobolev(4)?, &row)?
        );
    }
    Ok(())
}
