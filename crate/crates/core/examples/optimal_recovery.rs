//! Optimal weights at the origin and their error in the space they were built for.

use pde_recovery::mesh::{disk_case, DataVariant};
use pde_recovery::recovery::{error_norm, lagrange_check, optimal_norm_direct, optimal_recovery};
use pde_recovery::{Functional, KernelSpec};

fn main() -> pde_recovery::Result<()> {
    let x = [0.0, 0.0];
    for level in 0..3 {
        let mesh = disk_case(level);
        for variant in [DataVariant::Bary, DataVariant::Node] {
            let fs = mesh.point_sets(variant).functionals();
            for order in 4..=7 {
                let spec = KernelSpec::sobolev(order)?;
                let row = optimal_recovery(&spec, x, &fs)?;
                let quad = error_norm(&spec, &row)?;
                let direct = optimal_norm_direct(&spec, x, &fs, &row.weights)?;
                println!(
                    "C{level} {:4} order {order}: norm {quad:.4e} (direct {direct:.4e}), condition {:.1e}",
                    variant.name(),
                    row.system.condition_estimate
                );
            }
        }
    }

    // rows built at the boundary points reproduce the boundary data
    let mesh = disk_case(1);
    let spec = KernelSpec::sobolev(5)?;
    let fs: Vec<Functional> = mesh.point_sets(DataVariant::Node).boundary.iter().map(|&p| Functional::Eval(p)).collect();
    let rows = fs.iter().map(|f| optimal_recovery(&spec, f.point(), &fs)).collect::<Result<Vec<_>, _>>()?;
    println!("\nLagrange defect on the C1 boundary: {:.2e}", lagrange_check(&spec, &fs, &rows)?);
    Ok(())
}
