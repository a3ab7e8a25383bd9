//! Benchmark sweep over cases, methods and Sobolev orders, with CSV output.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::kernel::{Functional, Kernel, KernelSpec, Point};
use crate::mesh::{disk_case, fill_distance, DiskMesh};
use crate::recovery::{fmt_sci, ErrorReport, GramCache, NormEvaluator, OptimalSolver, RecoveryRow};
use crate::solvers::{prepare, Method, MethodConfig, MethodKind, NodeQuadrature, RecoveryMethod};

pub mod map;

pub use map::{error_map, write_map_csv, MapGrid, MapPoint};

/// Refinement level `C0`..`C4` of the disk triangulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(try_from = "String")]
pub struct Case(pub u32);

impl Case {
    pub const MAX_LEVEL: u32 = 4;

    pub fn mesh(self) -> DiskMesh {
        disk_case(self.0)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let level = s
            .strip_prefix(['C', 'c'])
            .and_then(|l| l.parse::<u32>().ok())
            .ok_or_else(|| Error::Config(format!("unknown case `{s}`, expected C0..C4")))?;
        if level > Self::MAX_LEVEL {
            return Err(Error::Config(format!("case `{s}` is finer than C{}", Self::MAX_LEVEL)));
        }
        Ok(Case(level))
    }
}

impl TryFrom<String> for Case {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Resolution of the polar error-map grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapOptions {
    /// Number of rings, the outermost on the unit circle.
    pub radial: usize,
    /// Points per ring.
    pub angular: usize,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self { radial: 16, angular: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub cases: Vec<Case>,
    pub methods: Vec<Method>,
    pub eval_orders: Vec<u32>,
    pub construction_order: u32,
    pub scale: f64,
    pub eval_point: Point,
    pub output_dir: Option<PathBuf>,
    pub bandwidth: usize,
    pub pinv_tolerance: f64,
    pub node_quadrature: NodeQuadrature,
    /// Probe rings used for the fill distance.
    pub probe_density: usize,
    /// Worker threads; 0 uses one per core.
    pub threads: usize,
    pub map: MapOptions,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            cases: (0..=3).map(Case).collect(),
            methods: Method::ALL.to_vec(),
            eval_orders: (3..=7).collect(),
            construction_order: MethodConfig::DEFAULT_CONSTRUCTION_ORDER,
            scale: 1.0,
            eval_point: [0.0, 0.0],
            output_dir: None,
            bandwidth: MethodConfig::DEFAULT_BANDWIDTH,
            pinv_tolerance: MethodConfig::DEFAULT_PINV_TOLERANCE,
            node_quadrature: NodeQuadrature::default(),
            probe_density: 400,
            threads: 0,
            map: MapOptions::default(),
        }
    }
}

impl BenchmarkConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&m) = self.eval_orders.iter().find(|&&m| m < 3) {
            return Err(Error::Config(format!("evaluation order {m} is below 3")));
        }
        for &m in &self.eval_orders {
            KernelSpec::new(m, 2, self.scale)?;
        }
        let construction = self.construction()?;
        let needs_double = self.methods.iter().any(|m| m.kind() == MethodKind::Symmetric);
        if needs_double && !construction.admits(2) {
            return Err(Error::Config(format!(
                "construction order {} cannot carry the symmetric collocation Gram matrix",
                self.construction_order
            )));
        }
        if self.bandwidth == 0 {
            return Err(Error::Config("bandwidth must be positive".into()));
        }
        if !(self.pinv_tolerance > 0.0) {
            return Err(Error::Config("pinv_tolerance must be positive".into()));
        }
        if self.eval_point.iter().any(|v| !v.is_finite()) || self.eval_point[0].hypot(self.eval_point[1]) > 1.0 {
            return Err(Error::Config("eval_point must lie in the closed unit disk".into()));
        }
        Ok(())
    }

    pub fn construction(&self) -> Result<KernelSpec> {
        KernelSpec::new(self.construction_order, 2, self.scale)
    }

    pub fn method_config(&self, method: Method) -> Result<MethodConfig> {
        Ok(MethodConfig {
            method,
            construction: self.construction()?,
            bandwidth: self.bandwidth,
            pinv_tolerance: self.pinv_tolerance,
            node_quadrature: self.node_quadrature,
        })
    }

    pub fn eval_spec(&self, order: u32) -> Result<KernelSpec> {
        KernelSpec::new(order, 2, self.scale)
    }
}

/// Mesh metadata for the `h` row of the tables.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseInfo {
    pub case: Case,
    pub boundary: usize,
    pub triangles: usize,
    pub vertices: usize,
    pub dof: usize,
    /// Largest distance of a disk point to its nearest vertex.
    pub fill_distance: f64,
    /// Half of `fill_distance`, the convention of the published tables.
    pub h: f64,
}

impl CaseInfo {
    pub const CSV_HEADER: &'static str = "case,n,m_bary,m_node,dof,fill_distance,h";

    pub fn new(case: Case, mesh: &DiskMesh, probe_density: usize) -> Self {
        let fill = fill_distance(mesh, probe_density);
        Self {
            case,
            boundary: mesh.boundary_count(),
            triangles: mesh.triangles.len(),
            vertices: mesh.vertices.len(),
            dof: mesh.interior_count(),
            fill_distance: fill,
            h: 0.5 * fill,
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.case,
            self.boundary,
            self.triangles,
            self.vertices,
            self.dof,
            fmt_sci(self.fill_distance),
            fmt_sci(self.h)
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkResult {
    pub cases: Vec<CaseInfo>,
    pub methods: Vec<Method>,
    pub eval_orders: Vec<u32>,
    /// Ordered by method, then case, then order.
    pub reports: Vec<ErrorReport>,
}

impl BenchmarkResult {
    pub fn get(&self, method: Method, case: Case, order: u32) -> Option<&ErrorReport> {
        let case = case.to_string();
        self.reports
            .iter()
            .find(|r| r.method == method.name() && r.case == case && r.eval_order == order)
    }

    pub fn norm(&self, method: Method, case: Case, order: u32) -> f64 {
        self.get(method, case, order).map_or(f64::NAN, |r| r.norm)
    }

    /// Table for one evaluation order: header, `h` row, one row per method.
    pub fn write_table(&self, order: u32, mut out: impl Write) -> Result<()> {
        let mut header = vec!["method".to_string()];
        header.extend(self.cases.iter().map(|c| c.case.to_string()));
        writeln!(out, "{}", header.join(","))?;
        let mut h = vec!["h".to_string()];
        h.extend(self.cases.iter().map(|c| fmt_sci(c.h)));
        if !self.methods.is_empty() {
            writeln!(out, "{}", h.join(","))?;
        }
        for &m in &self.methods {
            let mut row = vec![m.name().to_string()];
            row.extend(self.cases.iter().map(|c| fmt_sci(self.norm(m, c.case, order))));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_reports(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{}", ErrorReport::CSV_HEADER)?;
        for r in &self.reports {
            writeln!(out, "{}", r.csv_line())?;
        }
        Ok(())
    }

    pub fn write_cases(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{}", CaseInfo::CSV_HEADER)?;
        for c in &self.cases {
            writeln!(out, "{}", c.csv_line())?;
        }
        Ok(())
    }

    /// Write `order<m>.csv` per order, `reports.csv`, `cases.csv` and `orders.csv` into `dir`.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for &m in &self.eval_orders {
            let path = dir.join(format!("order{m}.csv"));
            self.write_table(m, create(&path)?)?;
            written.push(path);
        }
        let path = dir.join("reports.csv");
        self.write_reports(create(&path)?)?;
        written.push(path);
        let path = dir.join("cases.csv");
        self.write_cases(create(&path)?)?;
        written.push(path);
        let path = dir.join("orders.csv");
        write_orders_csv(&convergence_orders(&self.reports), create(&path)?)?;
        written.push(path);
        Ok(written)
    }
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// A method prepared on one mesh.
pub(crate) enum Prepared {
    /// One row for every evaluation order.
    Fixed(Box<dyn RecoveryMethod>),
    /// Symmetric collocation, sharing its Gram matrix with the optimal method of equal order.
    Collocation(OptimalSolver),
    /// The optimal row depends on the evaluation order and is rebuilt per order.
    Optimal(Arc<[Functional]>),
}

pub(crate) fn prepare_cell(cfg: &BenchmarkConfig, method: Method, mesh: &DiskMesh, cache: &GramCache) -> Result<Prepared> {
    let fs: Arc<[Functional]> = mesh.point_sets(method.variant()).functionals().into();
    match method.kind() {
        MethodKind::Optimal => Ok(Prepared::Optimal(fs)),
        MethodKind::Symmetric => Ok(Prepared::Collocation(cached_optimal(cfg.construction()?, &fs, cache)?)),
        _ => Ok(Prepared::Fixed(prepare(&cfg.method_config(method)?, mesh, None)?)),
    }
}

fn cached_optimal(spec: KernelSpec, fs: &Arc<[Functional]>, cache: &GramCache) -> Result<OptimalSolver> {
    let kernel = Kernel::new(spec);
    let gram = cache.get_or_insert(&kernel, fs)?;
    OptimalSolver::from_gram(kernel, fs.clone(), &gram)
}

impl Prepared {
    /// Row at `x` for evaluation order `spec`.
    pub(crate) fn row(&self, x: Point, spec: KernelSpec, cache: &GramCache) -> Result<RecoveryRow> {
        match self {
            Prepared::Fixed(m) => m.row_at(x),
            Prepared::Collocation(s) => s.row_at(x),
            Prepared::Optimal(fs) => cached_optimal(spec, fs, cache)?.row_at(x),
        }
    }

    pub(crate) fn norm(&self, x: Point, spec: KernelSpec, cache: &GramCache) -> Result<(f64, RecoveryRow)> {
        let row = self.row(x, spec, cache)?;
        let eval = NormEvaluator::with_cache(spec, row.functionals.clone(), cache)?;
        Ok((eval.norm(&row)?, row))
    }
}

fn cell_reports(cfg: &BenchmarkConfig, method: Method, case: Case, mesh: &DiskMesh, cache: &GramCache) -> Vec<ErrorReport> {
    let name = method.name();
    let case_name = case.to_string();
    let prepared = match prepare_cell(cfg, method, mesh, cache) {
        Ok(p) => p,
        Err(e) => {
            log::warn!("{name} {case_name}: {e}");
            return cfg.eval_orders.iter().map(|&m| ErrorReport::failed(name, &case_name, m, e.to_string())).collect();
        }
    };
    cfg.eval_orders
        .iter()
        .map(|&order| {
            let result = cfg.eval_spec(order).and_then(|spec| prepared.norm(cfg.eval_point, spec, cache));
            match result {
                Ok((norm, row)) => ErrorReport {
                    method: name.into(),
                    case: case_name.clone(),
                    eval_order: order,
                    norm,
                    condition: row.system.condition_estimate,
                    jitter: row.system.jitter_used,
                    reason: None,
                },
                Err(e) => {
                    log::debug!("{name} {case_name} order {order}: {e}");
                    ErrorReport::failed(name, &case_name, order, e.to_string())
                }
            }
        })
        .collect()
}

/// Run every (method, case) cell at every evaluation order.
///
/// Cells that fail are reported as `NaN` with a reason; only invalid configurations error.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkResult> {
    cfg.validate()?;
    let run = || run_cells(cfg);
    let result = if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run)
    } else {
        run()
    };
    if let Some(dir) = &cfg.output_dir {
        result.write_all(dir)?;
    }
    Ok(result)
}

fn run_cells(cfg: &BenchmarkConfig) -> BenchmarkResult {
    let meshes: Vec<(Case, DiskMesh)> = cfg.cases.par_iter().map(|&c| (c, c.mesh())).collect();
    let cases: Vec<CaseInfo> = meshes
        .par_iter()
        .map(|(c, mesh)| CaseInfo::new(*c, mesh, cfg.probe_density))
        .collect();
    let cache = GramCache::new();
    let cells: Vec<(Method, usize)> = cfg
        .methods
        .iter()
        .flat_map(|&m| (0..meshes.len()).map(move |i| (m, i)))
        .collect();
    let reports: Vec<ErrorReport> = cells
        .par_iter()
        .flat_map_iter(|&(m, i)| cell_reports(cfg, m, meshes[i].0, &meshes[i].1, &cache))
        .collect();
    BenchmarkResult { cases, methods: cfg.methods.clone(), eval_orders: cfg.eval_orders.clone(), reports }
}

/// Error reduction between consecutive cases.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub method: String,
    pub eval_order: u32,
    pub from: String,
    pub to: String,
    pub ratio: f64,
    /// `log2(ratio)`, the order in `h` for halved mesh widths.
    pub order: f64,
}

impl ConvergenceRow {
    pub const CSV_HEADER: &'static str = "method,eval_order,from,to,ratio,order";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.method,
            self.eval_order,
            self.from,
            self.to,
            fmt_sci(self.ratio),
            fmt_sci(self.order)
        )
    }
}

/// Ratios `norm(C_L) / norm(C_L+1)` for each method and order, skipping uncomputed cells.
pub fn convergence_orders(reports: &[ErrorReport]) -> Vec<ConvergenceRow> {
    let level = |r: &ErrorReport| r.case.parse::<Case>().ok().map(|c| c.0);
    let mut keys: Vec<(&str, u32)> = Vec::new();
    for r in reports {
        if !keys.contains(&(r.method.as_str(), r.eval_order)) {
            keys.push((r.method.as_str(), r.eval_order));
        }
    }
    let mut rows = Vec::new();
    for (method, order) in keys {
        let mut cells: Vec<(u32, &ErrorReport)> = reports
            .iter()
            .filter(|r| r.method == method && r.eval_order == order && r.is_computed())
            .filter_map(|r| level(r).map(|l| (l, r)))
            .collect();
        cells.sort_by_key(|&(l, _)| l);
        for pair in cells.windows(2) {
            let ((l0, a), (l1, b)) = (pair[0], pair[1]);
            if l1 != l0 + 1 || b.norm <= 0.0 {
                continue;
            }
            let ratio = a.norm / b.norm;
            rows.push(ConvergenceRow {
                method: method.into(),
                eval_order: order,
                from: a.case.clone(),
                to: b.case.clone(),
                ratio,
                order: ratio.log2(),
            });
        }
    }
    rows
}

/// Least-squares slope `p` of `log(norm) = p log(h) + c`, over the finite entries.
pub fn fit_order(h: &[f64], norms: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(norms)
        .filter(|(h, n)| h.is_finite() && **h > 0.0 && n.is_finite() && **n > 0.0)
        .map(|(h, n)| (h.ln(), n.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn write_orders_csv(rows: &[ConvergenceRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "{}", ConvergenceRow::CSV_HEADER)?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// Read a long-form report CSV written by [`BenchmarkResult::write_reports`].
pub fn read_reports(text: &str) -> Result<Vec<ErrorReport>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == ErrorReport::CSV_HEADER => {}
        _ => return Err(Error::Config(format!("expected header `{}`", ErrorReport::CSV_HEADER))),
    }
    let parse = |s: &str| -> Result<f64> {
        if s == "NaN" {
            Ok(f64::NAN)
        } else {
            s.parse().map_err(|_| Error::Config(format!("bad number `{s}`")))
        }
    };
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.splitn(7, ',').collect();
            if f.len() != 7 {
                return Err(Error::Config(format!("malformed report line `{line}`")));
            }
            Ok(ErrorReport {
                method: f[0].into(),
                case: f[1].into(),
                eval_order: f[2].parse().map_err(|_| Error::Config(format!("bad order `{}`", f[2])))?,
                norm: parse(f[3])?,
                condition: parse(f[4])?,
                jitter: parse(f[5])?,
                reason: (!f[6].is_empty()).then(|| f[6].to_string()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(methods: Vec<Method>, cases: Vec<u32>, orders: Vec<u32>) -> BenchmarkConfig {
        BenchmarkConfig {
            methods,
            cases: cases.into_iter().map(Case).collect(),
            eval_orders: orders,
            probe_density: 50,
            ..BenchmarkConfig::default()
        }
    }

    #[test]
    fn single_fem_cell() {
        let r = run_benchmark(&small(vec![Method::FemBary], vec![0], vec![4])).unwrap();
        assert_eq!(r.reports.len(), 1);
        assert!((r.reports[0].norm / 2.223e-2 - 1.0).abs() < 5e-4);
    }

    #[test]
    fn empty_method_list_gives_header_only() {
        let r = run_benchmark(&small(vec![], vec![0, 1], vec![5])).unwrap();
        let mut buf = Vec::new();
        r.write_table(5, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "method,C0,C1\n");
    }

    #[test]
    fn order_three_cells_fail_with_reason() {
        let r = run_benchmark(&small(vec![Method::OptNode], vec![0], vec![3, 4])).unwrap();
        assert!(r.reports[0].norm.is_nan());
        assert!(r.reports[0].reason.is_some());
        assert!(r.reports[1].is_computed());
    }

    #[test]
    fn ho_equals_opt_at_construction_order() {
        let r = run_benchmark(&small(vec![Method::HoBary, Method::OptBary], vec![0, 1], vec![7])).unwrap();
        for c in [Case(0), Case(1)] {
            assert_eq!(r.norm(Method::HoBary, c, 7), r.norm(Method::OptBary, c, 7));
        }
    }

    #[test]
    fn reruns_are_identical() {
        let cfg = small(vec![Method::KansaNode, Method::LocNode, Method::OptBary], vec![0, 1], vec![5, 6]);
        let a = run_benchmark(&cfg).unwrap();
        let b = run_benchmark(&cfg).unwrap();
        let text = |r: &BenchmarkResult| {
            let mut buf = Vec::new();
            r.write_reports(&mut buf).unwrap();
            buf
        };
        assert_eq!(text(&a), text(&b));
    }

    #[test]
    fn convergence_ratio_and_order() {
        let rep = |case: &str, norm| ErrorReport {
            method: "FEMBary".into(),
            case: case.into(),
            eval_order: 4,
            norm,
            condition: 1.0,
            jitter: 0.0,
            reason: None,
        };
        let rows = convergence_orders(&[rep("C0", 2.223e-2), rep("C1", 5.296e-3), rep("C2", f64::NAN)]);
        assert_eq!(rows.len(), 1);
        assert!((rows[0].ratio - 4.1975).abs() < 1e-3);
        assert!((rows[0].order - 2.07).abs() < 1e-2);
        let flat = convergence_orders(&[rep("C0", 1.0), rep("C1", 1.0)]);
        assert_eq!(flat[0].order, 0.0);
    }

    #[test]
    fn fitted_order_of_power_law() {
        let h = [0.4, 0.2, 0.1, 0.05];
        let norms: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powi(2)).collect();
        assert!((fit_order(&h, &norms) - 2.0).abs() < 1e-12);
        assert!(fit_order(&h[..1], &norms[..1]).is_nan());
        assert!((fit_order(&h, &[norms[0], f64::NAN, norms[2], norms[3]]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn config_from_toml() {
        let cfg = BenchmarkConfig::from_toml_str(
            r#"
            cases = ["C0", "C2"]
            methods = ["FEMBary", "OptNode"]
            eval_orders = [4, 5]
            node_quadrature = "consistent"
            [map]
            radial = 4
            "#,
        )
        .unwrap();
        assert_eq!(cfg.cases, vec![Case(0), Case(2)]);
        assert_eq!(cfg.methods, vec![Method::FemBary, Method::OptNode]);
        assert_eq!(cfg.node_quadrature, NodeQuadrature::Consistent);
        assert_eq!(cfg.map, MapOptions { radial: 4, angular: 64 });
        assert_eq!(cfg.construction_order, 7);
        assert!(BenchmarkConfig::from_toml_str("eval_orders = [2]").is_err());
        assert!(BenchmarkConfig::from_toml_str("cases = [\"C9\"]").is_err());
        assert!(BenchmarkConfig::from_toml_str("unknown_key = 1").is_err());
        assert!(BenchmarkConfig::from_toml_str("construction_order = 3").is_err());
    }

    #[test]
    fn reports_roundtrip_through_csv() {
        let r = run_benchmark(&small(vec![Method::OptBary], vec![0], vec![3, 5])).unwrap();
        let mut buf = Vec::new();
        r.write_reports(&mut buf).unwrap();
        let back = read_reports(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.len(), 2);
        assert!(back[0].norm.is_nan());
        assert!((back[1].norm / r.reports[1].norm - 1.0).abs() < 1e-5);
    }

    #[test]
    fn table_shape() {
        let r = run_benchmark(&small(Method::ALL.to_vec(), vec![0, 1], vec![5])).unwrap();
        let mut buf = Vec::new();
        r.write_table(5, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 11);
        assert!(lines[1].starts_with("h,"));
        assert!(lines.iter().all(|l| l.split(',').count() == 3));
    }
}
