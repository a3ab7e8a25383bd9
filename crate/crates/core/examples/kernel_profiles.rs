//! Radial profiles of the Sobolev kernel and its Laplacians for orders 4 to 7.

use pde_recovery::kernel::{Functional, Kernel, KernelSpec, Operator};

fn main() -> pde_recovery::Result<()> {
    let radii = [0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0];
    for order in 4..=7 {
        let kernel = Kernel::new(KernelSpec::sobolev(order)?);
        println!("order {order}  K(x,x) = {:.6}", kernel.spec().diagonal());
        println!("{:>6} {:>14} {:>14} {:>14}", "r", "K", "-Delta K", "Delta^2 K");
        let x = [0.0, 0.0];
        for r in radii {
            let y = [r, 0.0];
            let k = kernel.value(x, y);
            let lap = kernel.apply_pair(&Functional::Eval(x), &Functional::Apply(Operator::MinusLaplacian, y))?;
            let bilap = kernel.apply_pair(
                &Functional::Apply(Operator::MinusLaplacian, x),
                &Functional::Apply(Operator::MinusLaplacian, y),
            )?;
            println!("{r:>6.2} {k:>14.6e} {lap:>14.6e} {bilap:>14.6e}");
        }
        println!();
    }
    Ok(())
}
