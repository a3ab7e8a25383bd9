//! Pointwise worst-case error over a polar grid.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use super::{prepare_cell, BenchmarkConfig, Case, MapOptions};
use crate::error::Result;
use crate::kernel::Point;
use crate::recovery::{fmt_sci, GramCache};
use crate::solvers::Method;

/// Origin plus `radial` rings of `angular` points; the last ring lies on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct MapGrid {
    pub points: Vec<Point>,
}

impl MapGrid {
    pub fn polar(opts: MapOptions) -> Self {
        let mut points = vec![[0.0, 0.0]];
        let rings = opts.radial.max(1);
        let angular = opts.angular.max(1);
        for k in 1..=rings {
            let r = k as f64 / rings as f64;
            for j in 0..angular {
                let a = 2.0 * PI * j as f64 / angular as f64;
                points.push([r * a.cos(), r * a.sin()]);
            }
        }
        Self { points }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapPoint {
    pub x: Point,
    /// `NaN` where the method has no row, e.g. outside the polygonal mesh.
    pub norm: f64,
}

/// Error norm of `method` on `case` in order `eval_order` at every grid point.
pub fn error_map(cfg: &BenchmarkConfig, method: Method, case: Case, eval_order: u32, grid: &MapGrid) -> Result<Vec<MapPoint>> {
    cfg.validate()?;
    let mesh = case.mesh();
    let cache = GramCache::new();
    let spec = cfg.eval_spec(eval_order)?;
    let prepared = prepare_cell(cfg, method, &mesh, &cache)?;
    // fail early on structural problems such as an inadmissible order
    prepared.norm(grid.points[0], spec, &cache)?;
    Ok(grid
        .points
        .par_iter()
        .map(|&x| MapPoint { x, norm: prepared.norm(x, spec, &cache).map_or(f64::NAN, |(n, _)| n) })
        .collect())
}

pub fn write_map_csv(points: &[MapPoint], mut out: impl Write) -> Result<()> {
    writeln!(out, "x,y,norm")?;
    for p in points {
        writeln!(out, "{},{},{}", fmt_sci(p.x[0]), fmt_sci(p.x[1]), fmt_sci(p.norm))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::run_benchmark;

    fn cfg() -> BenchmarkConfig {
        BenchmarkConfig { probe_density: 20, ..BenchmarkConfig::default() }
    }

    #[test]
    fn grid_layout() {
        let g = MapGrid::polar(MapOptions { radial: 3, angular: 8 });
        assert_eq!(g.points.len(), 25);
        assert_eq!(g.points[0], [0.0, 0.0]);
        assert!((g.points[24][0].hypot(g.points[24][1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn optimal_map_vanishes_at_boundary_nodes() {
        // angular = 16 puts the outer ring on the C1 boundary vertices
        let grid = MapGrid::polar(MapOptions { radial: 2, angular: 16 });
        let map = error_map(&cfg(), Method::OptBary, Case(1), 5, &grid).unwrap();
        for p in &map[map.len() - 16..] {
            assert!(p.norm <= 1e-8, "{:?}", p);
        }
    }

    #[test]
    fn origin_matches_benchmark_cell() {
        let grid = MapGrid::polar(MapOptions { radial: 2, angular: 4 });
        let c = BenchmarkConfig { methods: vec![Method::FemNode], cases: vec![Case(1)], eval_orders: vec![5], ..cfg() };
        let map = error_map(&c, Method::FemNode, Case(1), 5, &grid).unwrap();
        let table = run_benchmark(&c).unwrap();
        assert_eq!(map[0].norm, table.norm(Method::FemNode, Case(1), 5));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_map_csv(&[MapPoint { x: [0.5, 0.0], norm: f64::NAN }], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,y,norm\n5.00000e-1,0.00000e0,NaN\n");
    }
}
