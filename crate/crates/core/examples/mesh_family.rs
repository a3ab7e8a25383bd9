//! The five disk triangulations: sizes, fill distances, and file export.

use pde_recovery::bench::{Case, CaseInfo};

fn main() -> pde_recovery::Result<()> {
    println!("{}", CaseInfo::CSV_HEADER);
    for level in 0..=4 {
        let case = Case(level);
        let mesh = case.mesh();
        println!("{}", CaseInfo::new(case, &mesh, 400).csv_line());
    }

    let dir = std::env::temp_dir().join("pde-recovery-mesh");
    std::fs::create_dir_all(&dir)?;
    let mesh = Case(1).mesh();
    mesh.write_nodes(std::fs::File::create(dir.join("C1.nodes"))?)?;
    mesh.write_elements(std::fs::File::create(dir.join("C1.elements"))?)?;
    println!("\nC1 written to {}", dir.display());
    Ok(())
}
