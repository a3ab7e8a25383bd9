//! Uniformly refined triangulations of the unit disk.
//!
//! Level 0 is the fan of 8 triangles around the origin. Each refinement splits every
//! triangle into four through its edge midpoints; midpoints of boundary edges are pushed
//! radially onto the unit circle. Vertices of coarser levels keep their indices, so the
//! origin is always vertex 0.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use crate::error::Result;
use crate::kernel::{distance, Functional, Operator, Point};

#[derive(Clone, Debug, PartialEq)]
pub struct DiskMesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    pub level: u32,
}

/// Where the PDE data `f` is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DataVariant {
    Bary,
    Node,
}

impl DataVariant {
    pub fn name(self) -> &'static str {
        match self {
            DataVariant::Bary => "Bary",
            DataVariant::Node => "Node",
        }
    }
}

/// Data locations of one discretisation.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSets {
    /// PDE data points `x_j`.
    pub pde: Vec<Point>,
    /// Dirichlet data points `y_k`, in vertex order.
    pub boundary: Vec<Point>,
    /// Interior vertices (the unknowns of mesh-based methods).
    pub interior: Vec<Point>,
}

impl PointSets {
    /// PDE functionals `-Delta u(x_j)` followed by boundary evaluations `u(y_k)`.
    pub fn functionals(&self) -> Vec<Functional> {
        self.pde
            .iter()
            .map(|&p| Functional::Apply(Operator::MinusLaplacian, p))
            .chain(self.boundary.iter().map(|&p| Functional::Eval(p)))
            .collect()
    }
}

pub fn base_disk() -> DiskMesh {
    let mut vertices = vec![[0.0, 0.0]];
    for k in 0..8 {
        let a = f64::from(k) * PI / 4.0;
        vertices.push([a.cos(), a.sin()]);
    }
    let triangles = (0..8).map(|k| [0, 1 + k, 1 + (k + 1) % 8]).collect();
    let mut boundary = vec![true; 9];
    boundary[0] = false;
    DiskMesh { vertices, triangles, boundary, level: 0 }
}

/// Regular 1-to-4 refinement with boundary midpoints projected onto the circle.
pub fn refine(mesh: &DiskMesh) -> DiskMesh {
    // edges in order of first appearance, with their triangle count
    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<((usize, usize), u8)> = Vec::new();
    for t in &mesh.triangles {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            let key = (a.min(b), a.max(b));
            match edge_index.get(&key) {
                Some(&i) => edges[i].1 += 1,
                None => {
                    edge_index.insert(key, edges.len());
                    edges.push((key, 1));
                }
            }
        }
    }

    let mut vertices = mesh.vertices.clone();
    let mut boundary = mesh.boundary.clone();
    for &((a, b), count) in &edges {
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let mut m = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        let on_boundary = count == 1;
        if on_boundary {
            let r = m[0].hypot(m[1]);
            m = [m[0] / r, m[1] / r];
        }
        vertices.push(m);
        boundary.push(on_boundary);
    }
    let offset = mesh.vertices.len();
    let mid = |a: usize, b: usize| offset + edge_index[&(a.min(b), a.max(b))];

    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    DiskMesh { vertices, triangles, boundary, level: mesh.level + 1 }
}

/// Case `C<level>`.
pub fn disk_case(level: u32) -> DiskMesh {
    (0..level).fold(base_disk(), |m, _| refine(&m))
}

impl DiskMesh {
    pub fn boundary_count(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    pub fn interior_count(&self) -> usize {
        self.vertices.len() - self.boundary_count()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn barycenter(&self, t: usize) -> Point {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn barycenters(&self) -> Vec<Point> {
        (0..self.triangles.len()).map(|t| self.barycenter(t)).collect()
    }

    pub fn boundary_indices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| self.boundary[i]).collect()
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| !self.boundary[i]).collect()
    }

    /// Barycentric coordinates of `x` in triangle `t`.
    pub fn barycentric(&self, t: usize, x: Point) -> [f64; 3] {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (x[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    /// First triangle containing `x` (with a small tolerance), and its barycentric coordinates.
    pub fn locate(&self, x: Point) -> Option<(usize, [f64; 3])> {
        let tol = 1e-12;
        (0..self.triangles.len())
            .map(|t| (t, self.barycentric(t, x)))
            .find(|(_, l)| l.iter().all(|&v| v >= -tol))
    }

    /// The vertex coinciding with `x`, if any.
    pub fn vertex_at(&self, x: Point) -> Option<usize> {
        self.vertices.iter().position(|&v| distance(v, x) <= 1e-13)
    }

    pub fn point_sets(&self, variant: DataVariant) -> PointSets {
        let pde = match variant {
            DataVariant::Bary => self.barycenters(),
            DataVariant::Node => self.vertices.clone(),
        };
        PointSets {
            pde,
            boundary: self.boundary_indices().into_iter().map(|i| self.vertices[i]).collect(),
            interior: self.interior_indices().into_iter().map(|i| self.vertices[i]).collect(),
        }
    }

    /// Plain-text export: one vertex per line `x y boundary_flag`.
    pub fn write_nodes(&self, mut out: impl Write) -> Result<()> {
        for (v, &b) in self.vertices.iter().zip(&self.boundary) {
            writeln!(out, "{:.17e} {:.17e} {}", v[0], v[1], u8::from(b))?;
        }
        Ok(())
    }

    /// Plain-text export: one triangle per line `i j k`, zero-based.
    pub fn write_elements(&self, mut out: impl Write) -> Result<()> {
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

pub fn point_sets(mesh: &DiskMesh, variant: DataVariant) -> PointSets {
    mesh.point_sets(variant)
}

/// Bucket grid over `[-1, 1]^2` for nearest-vertex queries.
struct VertexGrid<'a> {
    points: &'a [Point],
    cells: Vec<Vec<usize>>,
    n: usize,
    width: f64,
}

impl<'a> VertexGrid<'a> {
    fn new(points: &'a [Point]) -> Self {
        let n = ((points.len() as f64).sqrt().ceil() as usize).max(1);
        let width = 2.0 / n as f64;
        let mut cells = vec![Vec::new(); n * n];
        let g = Self { points, cells: Vec::new(), n, width };
        for (i, &p) in points.iter().enumerate() {
            let (cx, cy) = g.cell(p);
            cells[cy * n + cx].push(i);
        }
        Self { cells, ..g }
    }

    fn cell(&self, p: Point) -> (usize, usize) {
        let f = |v: f64| (((v + 1.0) / self.width).floor().max(0.0) as usize).min(self.n - 1);
        (f(p[0]), f(p[1]))
    }

    fn nearest_distance(&self, p: Point) -> f64 {
        let (cx, cy) = self.cell(p);
        let mut best = f64::INFINITY;
        let mut ring = 0usize;
        loop {
            let lo_x = cx.saturating_sub(ring);
            let hi_x = (cx + ring).min(self.n - 1);
            let lo_y = cy.saturating_sub(ring);
            let hi_y = (cy + ring).min(self.n - 1);
            for y in lo_y..=hi_y {
                for x in lo_x..=hi_x {
                    let on_ring = x.abs_diff(cx) == ring || y.abs_diff(cy) == ring;
                    if !on_ring {
                        continue;
                    }
                    for &i in &self.cells[y * self.n + x] {
                        best = best.min(distance(self.points[i], p));
                    }
                }
            }
            // every unvisited cell is at least `ring * width` away
            if best <= ring as f64 * self.width || ring > self.n {
                return best;
            }
            ring += 1;
        }
    }
}

/// Largest distance from a probe point of the unit disk to the nearest vertex.
///
/// Probes form a polar grid with `probe_density` rings; ring `k` carries `8k` points.
pub fn fill_distance(mesh: &DiskMesh, probe_density: usize) -> f64 {
    fill_distance_of(&mesh.vertices, probe_density)
}

pub fn fill_distance_of(points: &[Point], probe_density: usize) -> f64 {
    let grid = VertexGrid::new(points);
    let n = probe_density.max(1);
    let mut best = grid.nearest_distance([0.0, 0.0]);
    for k in 1..=n {
        let r = k as f64 / n as f64;
        let count = 8 * k;
        for j in 0..count {
            let a = 2.0 * PI * (j as f64 + 0.5 * (k % 2) as f64) / count as f64;
            best = best.max(grid.nearest_distance([r * a.cos(), r * a.sin()]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::collections::HashMap;

    // (n, m_Bary, m_Node, DOF)
    const TABLE: [(usize, usize, usize, usize); 5] =
        [(8, 8, 9, 1), (16, 32, 25, 9), (32, 128, 81, 49), (64, 512, 289, 225), (128, 2048, 1089, 961)];

    #[test]
    fn base_disk_shape() {
        let m = base_disk();
        assert_eq!((m.vertices.len(), m.triangles.len(), m.boundary_count()), (9, 8, 8));
        assert_eq!(m.barycenters().len(), 8);
        let area = (PI / 4.0).sin() / 2.0;
        for t in 0..8 {
            assert_relative_eq!(m.signed_area(t), area, max_relative = 1e-14);
        }
    }

    #[test]
    fn counts_follow_table() {
        let mut m = base_disk();
        for (level, &(n, bary, node, dof)) in TABLE.iter().enumerate() {
            if level > 0 {
                m = refine(&m);
            }
            assert_eq!(m.level as usize, level);
            assert_eq!(m.boundary_count(), n);
            assert_eq!(m.triangles.len(), bary);
            assert_eq!(m.vertices.len(), node);
            assert_eq!(m.interior_count(), dof);
            assert_eq!(m.triangles.len(), 8 * 4usize.pow(level as u32));
        }
    }

    #[test]
    fn refined_meshes_are_valid() {
        let mut m = base_disk();
        for _ in 0..4 {
            m = refine(&m);
            for (v, &b) in m.vertices.iter().zip(&m.boundary) {
                if b {
                    assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-12);
                } else {
                    assert!(v[0].hypot(v[1]) < 1.0);
                }
            }
            for t in 0..m.triangles.len() {
                assert!(m.signed_area(t) > 0.0);
            }
            let mut count: HashMap<(usize, usize), usize> = HashMap::new();
            for t in &m.triangles {
                for e in 0..3 {
                    let (a, b) = (t[e], t[(e + 1) % 3]);
                    *count.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
            for (&(a, b), &c) in &count {
                assert!(c <= 2);
                let boundary_edge = m.boundary[a] && m.boundary[b];
                assert_eq!(c == 1, boundary_edge, "edge ({a},{b})");
            }
        }
    }

    #[test]
    fn vertices_are_nested() {
        let coarse = disk_case(2);
        let fine = refine(&coarse);
        for (i, v) in coarse.vertices.iter().enumerate() {
            assert_eq!(*v, fine.vertices[i]);
            assert_eq!(coarse.boundary[i], fine.boundary[i]);
        }
        assert_eq!(fine.vertices[0], [0.0, 0.0]);
    }

    #[test]
    fn point_set_sizes() {
        let c0 = base_disk().point_sets(DataVariant::Bary);
        assert_eq!((c0.pde.len(), c0.boundary.len(), c0.interior.len()), (8, 8, 1));
        let c3 = disk_case(3).point_sets(DataVariant::Node);
        assert_eq!((c3.pde.len(), c3.boundary.len(), c3.interior.len()), (289, 64, 225));
        assert_eq!(c3.functionals().len(), 289 + 64);
    }

    #[test]
    fn fill_distance_single_vertex() {
        assert_relative_eq!(fill_distance_of(&[[0.0, 0.0]], 50), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn fill_distance_of_base_disk_is_sector_circumradius() {
        // circumradius of the isosceles sector triangle: 1 / (2 cos(pi/8))
        let want = 1.0 / (2.0 * (PI / 8.0).cos());
        let h = fill_distance(&base_disk(), 400);
        assert!((h - want).abs() < 0.01 * want, "h = {h}");
    }

    #[test]
    fn fill_distance_halves_under_refinement() {
        let h1 = fill_distance(&disk_case(1), 400);
        let h2 = fill_distance(&disk_case(2), 400);
        assert!((h2 / h1 - 0.5).abs() < 0.05, "ratio {}", h2 / h1);
    }

    #[test]
    fn export_formats() {
        let m = base_disk();
        let mut nodes = Vec::new();
        let mut elems = Vec::new();
        m.write_nodes(&mut nodes).unwrap();
        m.write_elements(&mut elems).unwrap();
        let nodes = String::from_utf8(nodes).unwrap();
        let elems = String::from_utf8(elems).unwrap();
        assert_eq!(nodes.lines().count(), 9);
        assert!(nodes.lines().next().unwrap().ends_with(" 0"));
        assert_eq!(elems.lines().next().unwrap(), "0 1 2");
    }

    #[test]
    fn locate_points() {
        let m = disk_case(1);
        let (t, l) = m.locate([0.1, 0.05]).unwrap();
        let v = m.triangles[t].map(|i| m.vertices[i]);
        let x = l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0];
        assert_relative_eq!(x, 0.1, max_relative = 1e-12);
        assert!(m.locate([1.5, 0.0]).is_none());
    }
}
