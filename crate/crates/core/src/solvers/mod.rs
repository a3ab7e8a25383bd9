//! Benchmark methods rewritten as direct linear recoveries.
//!
//! Every method is prepared once per mesh (assembly and factorisation) and then yields a
//! [`RecoveryRow`] at any evaluation point. Rows always refer to the functional list of the
//! data variant: `-Delta u` at the PDE points followed by `u` at the boundary vertices.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{Functional, KernelSpec, Point};
use crate::linalg::{CsrMatrix, FactorizationReport};
use crate::mesh::{DataVariant, DiskMesh};
use crate::recovery::{fmt_sci, OptimalSolver, RecoveryRow};

pub mod fem;
pub mod gfd;
pub mod kansa;
pub mod symmetric;

pub use fem::{fem_recovery, FemSolver, NodeQuadrature};
pub use gfd::{gfd_local_recovery, GfdSolver};
pub use kansa::{kansa_recovery, KansaSolver};
pub use symmetric::{symmetric_collocation_recovery, SymmetricSolver};

/// The nine benchmark methods, in table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Deserialize)]
#[serde(try_from = "String")]
pub enum Method {
    FemBary,
    FemNode,
    KansaBary,
    KansaNode,
    HoBary,
    HoNode,
    OptBary,
    OptNode,
    LocNode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodKind {
    Fem,
    Kansa,
    Symmetric,
    Optimal,
    LocalGfd,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::FemBary,
        Method::FemNode,
        Method::KansaBary,
        Method::KansaNode,
        Method::HoBary,
        Method::HoNode,
        Method::OptBary,
        Method::OptNode,
        Method::LocNode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::FemBary => "FEMBary",
            Method::FemNode => "FEMNode",
            Method::KansaBary => "KansaBary",
            Method::KansaNode => "KansaNode",
            Method::HoBary => "HOBary",
            Method::HoNode => "HONode",
            Method::OptBary => "OptBary",
            Method::OptNode => "OptNode",
            Method::LocNode => "LocNode",
        }
    }

    pub fn kind(self) -> MethodKind {
        match self {
            Method::FemBary | Method::FemNode => MethodKind::Fem,
            Method::KansaBary | Method::KansaNode => MethodKind::Kansa,
            Method::HoBary | Method::HoNode => MethodKind::Symmetric,
            Method::OptBary | Method::OptNode => MethodKind::Optimal,
            Method::LocNode => MethodKind::LocalGfd,
        }
    }

    pub fn variant(self) -> DataVariant {
        match self {
            Method::FemBary | Method::KansaBary | Method::HoBary | Method::OptBary => DataVariant::Bary,
            _ => DataVariant::Node,
        }
    }

    /// Whether the row depends on the Sobolev order used for evaluation.
    pub fn depends_on_eval_order(self) -> bool {
        self.kind() == MethodKind::Optimal
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    /// Kernel used by HO*, Kansa* and LocNode to build their rows.
    pub construction: KernelSpec,
    /// Stencil size of LocNode.
    pub bandwidth: usize,
    /// Relative singular value cutoff of the Kansa pseudoinverse.
    pub pinv_tolerance: f64,
    pub node_quadrature: NodeQuadrature,
}

impl MethodConfig {
    pub const DEFAULT_CONSTRUCTION_ORDER: u32 = 7;
    pub const DEFAULT_BANDWIDTH: usize = 15;
    pub const DEFAULT_PINV_TOLERANCE: f64 = 1e-10;

    pub fn new(method: Method) -> Self {
        Self {
            method,
            construction: KernelSpec::sobolev(Self::DEFAULT_CONSTRUCTION_ORDER).expect("order 7 is valid"),
            bandwidth: Self::DEFAULT_BANDWIDTH,
            pinv_tolerance: Self::DEFAULT_PINV_TOLERANCE,
            node_quadrature: NodeQuadrature::default(),
        }
    }
}

/// Square or rectangular system matrix of a method.
#[derive(Clone, Debug)]
pub enum SystemMatrix {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix),
}

impl SystemMatrix {
    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            SystemMatrix::Dense(m) => m.clone(),
            SystemMatrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            SystemMatrix::Dense(m) => m.shape(),
            SystemMatrix::Sparse(m) => (m.nrows, m.ncols),
        }
    }
}

/// `A u = B f + C g`: the solution values (or coefficients) `u` at `unknown_points`.
#[derive(Clone, Debug)]
pub struct LinearRecoverySystem {
    pub a: SystemMatrix,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub unknown_points: Vec<Point>,
}

impl LinearRecoverySystem {
    pub fn validate(&self) -> Result<()> {
        let (rows, _) = self.a.shape();
        if self.b.nrows() != rows || self.c.nrows() != rows {
            return Err(Error::DimensionMismatch(format!(
                "A has {rows} rows, B {} and C {}",
                self.b.nrows(),
                self.c.nrows()
            )));
        }
        Ok(())
    }

    /// Write `A.csv`, `B.csv`, `C.csv` and `unknowns.csv` into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        match &self.a {
            SystemMatrix::Dense(m) => write_matrix(&dir.join("A.csv"), m)?,
            SystemMatrix::Sparse(m) => {
                let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("A.csv"))?);
                writeln!(out, "row,col,value")?;
                for i in 0..m.nrows {
                    for (c, v) in m.row(i) {
                        writeln!(out, "{i},{c},{}", fmt_sci(v))?;
                    }
                }
            }
        }
        write_matrix(&dir.join("B.csv"), &self.b)?;
        write_matrix(&dir.join("C.csv"), &self.c)?;
        let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("unknowns.csv"))?);
        writeln!(out, "x,y")?;
        for p in &self.unknown_points {
            writeln!(out, "{},{}", fmt_sci(p[0]), fmt_sci(p[1]))?;
        }
        Ok(())
    }
}

fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|&v| fmt_sci(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Write a recovery row as `kind,x,y,weight` lines.
pub fn write_row_csv(row: &RecoveryRow, mut out: impl Write) -> Result<()> {
    writeln!(out, "kind,x,y,weight")?;
    for (f, w) in row.functionals.iter().zip(row.weights.iter()) {
        let kind = if f.is_evaluation() { "boundary" } else { "pde" };
        let p = f.point();
        writeln!(out, "{kind},{},{},{}", fmt_sci(p[0]), fmt_sci(p[1]), fmt_sci(*w))?;
    }
    Ok(())
}

/// A prepared method.
pub trait RecoveryMethod: Send + Sync {
    fn method_name(&self) -> &str;

    fn functionals(&self) -> &Arc<[Functional]>;

    /// Factorisation report of the system behind the rows.
    fn report(&self) -> FactorizationReport;

    fn row_at(&self, x: Point) -> Result<RecoveryRow>;

    fn system(&self) -> LinearRecoverySystem;
}

/// The error-optimal method for the evaluation space `spec`.
pub struct OptimalMethod {
    name: String,
    inner: SymmetricSolver,
}

impl OptimalMethod {
    pub fn new(mesh: &DiskMesh, variant: DataVariant, spec: KernelSpec) -> Result<Self> {
        Ok(Self { name: format!("Opt{}", variant.name()), inner: SymmetricSolver::new(mesh, variant, spec)? })
    }

    pub fn solver(&self) -> &OptimalSolver {
        self.inner.solver()
    }
}

impl RecoveryMethod for OptimalMethod {
    fn method_name(&self) -> &str {
        &self.name
    }

    fn functionals(&self) -> &Arc<[Functional]> {
        self.inner.functionals()
    }

    fn report(&self) -> FactorizationReport {
        self.inner.report()
    }

    fn row_at(&self, x: Point) -> Result<RecoveryRow> {
        self.inner.row_at(x)
    }

    fn system(&self) -> LinearRecoverySystem {
        self.inner.system()
    }
}

/// Assemble and factorise `config.method` on `mesh`. Optimal methods need the evaluation space.
pub fn prepare(config: &MethodConfig, mesh: &DiskMesh, eval_spec: Option<KernelSpec>) -> Result<Box<dyn RecoveryMethod>> {
    let variant = config.method.variant();
    Ok(match config.method.kind() {
        MethodKind::Fem => Box::new(FemSolver::new(mesh, variant, config.node_quadrature)?),
        MethodKind::Kansa => Box::new(KansaSolver::new(mesh, variant, config.construction, &mesh.vertices, config.pinv_tolerance)?),
        MethodKind::Symmetric => Box::new(SymmetricSolver::new(mesh, variant, config.construction)?),
        MethodKind::Optimal => {
            let spec = eval_spec.ok_or_else(|| Error::Config("optimal methods need an evaluation space".into()))?;
            Box::new(OptimalMethod::new(mesh, variant, spec)?)
        }
        MethodKind::LocalGfd => {
            if variant != DataVariant::Node {
                return Err(Error::Config("the local stencil method uses nodal data".into()));
            }
            Box::new(GfdSolver::new(mesh, config.construction, config.bandwidth)?)
        }
    })
}
