//! Piecewise linear FEM against the optimal recovery on the same data.

use pde_recovery::mesh::{disk_case, DataVariant};
use pde_recovery::recovery::{error_norm, optimal_recovery};
use pde_recovery::solvers::fem_recovery;
use pde_recovery::KernelSpec;

fn main() -> pde_recovery::Result<()> {
    let x = [0.0, 0.0];
    for order in 4..=6 {
        let spec = KernelSpec::sobolev(order)?;
        println!("order {order}");
        println!("{:>4} {:>12} {:>12} {:>8}", "case", "FEMBary", "OptBary", "ratio");
        let mut prev: Option<f64> = None;
        for level in 0..4 {
            let mesh = disk_case(level);
            let fem = error_norm(&spec, &fem_recovery(&mesh, x, DataVariant::Bary)?)?;
            let fs = mesh.point_sets(DataVariant::Bary).functionals();
            let opt = error_norm(&spec, &optimal_recovery(&spec, x, &fs)?)?;
            let rate = prev.map_or(String::new(), |p| format!("  rate {:.2}", (p / fem).log2()));
            println!("{:>4} {fem:>12.4e} {opt:>12.4e} {:>8.2}{rate}", format!("C{level}"), fem / opt);
            prev = Some(fem);
        }
        println!();
    }
    Ok(())
}
