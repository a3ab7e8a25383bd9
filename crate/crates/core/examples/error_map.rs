//! Pointwise worst-case error of two methods over the disk, written as CSV.

use pde_recovery::bench::{error_map, write_map_csv, BenchmarkConfig, Case, MapGrid, MapOptions};
use pde_recovery::Method;

fn main() -> pde_recovery::Result<()> {
    let cfg = BenchmarkConfig::default();
    let grid = MapGrid::polar(MapOptions { radial: 12, angular: 48 });
    let dir = std::env::temp_dir().join("pde-recovery-maps");
    std::fs::create_dir_all(&dir)?;
    for method in [Method::FemBary, Method::OptBary] {
        let map = error_map(&cfg, method, Case(1), 5, &grid)?;
        let worst = map.iter().filter(|p| p.norm.is_finite()).max_by(|a, b| a.norm.total_cmp(&b.norm)).unwrap();
        println!("{method}: largest error {:.3e} at ({:.3}, {:.3})", worst.norm, worst.x[0], worst.x[1]);
        let path = dir.join(format!("{method}_C1_order5.csv"));
        write_map_csv(&map, std::fs::File::create(&path)?)?;
        println!("  written to {}", path.display());
    }
    Ok(())
}
