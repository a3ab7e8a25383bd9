//! The full sweep: nine methods, cases C0 to C3, Sobolev orders 3 to 7.

use pde_recovery::bench::{convergence_orders, run_benchmark, write_orders_csv, BenchmarkConfig};
use pde_recovery::Method;

fn main() -> pde_recovery::Result<()> {
    let cfg = BenchmarkConfig::default();
    let result = run_benchmark(&cfg)?;
    let mut out = std::io::stdout().lock();
    for &order in &result.eval_orders {
        println!("order {order}");
        result.write_table(order, &mut out)?;
        println!();
    }
    let fem: Vec<_> = result.reports.iter().filter(|r| r.method == Method::FemBary.name()).cloned().collect();
    println!("FEMBary convergence");
    write_orders_csv(&convergence_orders(&fem), &mut out)?;
    Ok(())
}
