//! Unsymmetric collocation: how the pseudoinverse cutoff changes the error.

use pde_recovery::mesh::{disk_case, DataVariant};
use pde_recovery::recovery::error_norm;
use pde_recovery::solvers::{KansaSolver, RecoveryMethod};
use pde_recovery::KernelSpec;

fn main() -> pde_recovery::Result<()> {
    let construction = KernelSpec::sobolev(7)?;
    let eval = KernelSpec::sobolev(5)?;
    for level in 0..3 {
        let mesh = disk_case(level);
        for tol in [1e-14, 1e-12, 1e-10, 1e-8, 1e-6] {
            let s = KansaSolver::new(&mesh, DataVariant::Bary, construction, &mesh.vertices, tol)?;
            let row = s.row_at([0.0, 0.0])?;
            let rank = s.report().truncated_rank.unwrap_or(0);
            println!(
                "C{level} tol {tol:.0e}: rank {rank:>3} of {:>3}, order-5 error {:.4e}",
                mesh.vertices.len(),
                error_norm(&eval, &row)?
            );
        }
    }
    Ok(())
}
