//! Sobolev (Matérn) kernels and their action under data functionals.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::{gamma_int, RadialProfile};

pub type Point = [f64; 2];

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Sobolev order `m`, space dimension `d` and scale `s` of the kernel
/// `K(x, y) = 2^(1-m) / Gamma(m) * g_(m-d/2)(|x - y| / s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub order: u32,
    pub dim: u32,
    pub scale: f64,
}

impl KernelSpec {
    pub fn new(order: u32, dim: u32, scale: f64) -> Result<Self> {
        if dim != 2 {
            return Err(Error::InvalidKernel(format!("only planar kernels are supported, got d = {dim}")));
        }
        if 2 * order <= dim {
            return Err(Error::InvalidKernel(format!("Sobolev order {order} must exceed d/2 = {}", dim / 2)));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidKernel(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { order, dim, scale })
    }

    /// Planar Sobolev kernel of the given order at scale 1.
    pub fn sobolev(order: u32) -> Result<Self> {
        Self::new(order, 2, 1.0)
    }

    /// Bessel order `nu = m - d/2`.
    pub fn nu(&self) -> u32 {
        self.order - self.dim / 2
    }

    pub fn normalization(&self) -> f64 {
        2f64.powi(1 - self.order as i32) / gamma_int(self.order)
    }

    /// `K(x, x)`, the same for every `x`.
    pub fn diagonal(&self) -> f64 {
        self.normalization() * crate::special::matern_g_at_zero(self.nu())
    }

    /// Whether the kernel can carry `laplacians` Laplacians in total (split over both arguments).
    pub fn admits(&self, laplacians: u32) -> bool {
        self.nu() > laplacians
    }

    pub(crate) fn key(&self) -> (u32, u32, u64) {
        (self.order, self.dim, self.scale.to_bits())
    }
}

/// Differential operator applied at a point before evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    MinusLaplacian,
}

impl Operator {
    fn laplacians(self) -> u32 {
        match self {
            Operator::MinusLaplacian => 1,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Operator::MinusLaplacian => -1.0,
        }
    }
}

/// A data functional: a point evaluation `u(p)` or an operator value `(L u)(p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Functional {
    Eval(Point),
    Apply(Operator, Point),
}

impl Functional {
    pub fn point(&self) -> Point {
        match *self {
            Functional::Eval(p) | Functional::Apply(_, p) => p,
        }
    }

    pub fn is_evaluation(&self) -> bool {
        matches!(self, Functional::Eval(_))
    }

    fn laplacians(&self) -> u32 {
        match self {
            Functional::Eval(_) => 0,
            Functional::Apply(op, _) => op.laplacians(),
        }
    }

    fn sign(&self) -> f64 {
        match self {
            Functional::Eval(_) => 1.0,
            Functional::Apply(op, _) => op.sign(),
        }
    }

    pub(crate) fn key(&self) -> (u8, u64, u64) {
        let p = self.point();
        let tag = match self {
            Functional::Eval(_) => 0,
            Functional::Apply(Operator::MinusLaplacian, _) => 1,
        };
        (tag, p[0].to_bits(), p[1].to_bits())
    }
}

/// A kernel with its radial Laplacian expansions prepared for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Kernel {
    spec: KernelSpec,
    normalization: f64,
    profiles: Vec<Option<RadialProfile>>,
}

const MAX_LAPLACIANS: u32 = 2;

impl Kernel {
    pub fn new(spec: KernelSpec) -> Self {
        let profiles = (0..=MAX_LAPLACIANS)
            .map(|t| RadialProfile::new(spec.nu(), spec.dim, t).ok())
            .collect();
        Self { spec, normalization: spec.normalization(), profiles }
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    fn profile(&self, laplacians: u32) -> Result<&RadialProfile> {
        self.profiles
            .get(laplacians as usize)
            .and_then(Option::as_ref)
            .ok_or(Error::OrderTooLow { nu: self.spec.nu(), laplacians })
    }

    /// Check that every pair drawn from `fs` is finite.
    pub fn check_admissible(&self, fs: &[Functional]) -> Result<()> {
        let max = fs.iter().map(Functional::laplacians).max().unwrap_or(0);
        self.profile(2 * max).map(|_| ())
    }

    /// `a^x b^y K(x, y)`.
    pub fn apply_pair(&self, a: &Functional, b: &Functional) -> Result<f64> {
        let laps = a.laplacians() + b.laplacians();
        let profile = self.profile(laps)?;
        let s = self.spec.scale;
        let r = distance(a.point(), b.point()) / s;
        let chain = s.powi(-2 * laps as i32);
        Ok(a.sign() * b.sign() * self.normalization * chain * profile.eval(r))
    }

    pub fn value(&self, x: Point, y: Point) -> f64 {
        self.apply_pair(&Functional::Eval(x), &Functional::Eval(y))
            .expect("plain kernel values are always admissible")
    }

    pub fn gram_matrix(&self, fs: &[Functional]) -> Result<DMatrix<f64>> {
        self.check_admissible(fs)?;
        let n = fs.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (i..n).map(|j| self.apply_pair(&fs[i], &fs[j])).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut g = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            for (off, &v) in row.iter().enumerate() {
                g[(i, i + off)] = v;
                g[(i + off, i)] = v;
            }
        }
        Ok(g)
    }

    /// Rectangular matrix `a_i^x b_j^y K(x, y)`.
    pub fn cross_matrix(&self, rows: &[Functional], cols: &[Functional]) -> Result<DMatrix<f64>> {
        let data: Vec<Vec<f64>> = rows
            .par_iter()
            .map(|a| cols.iter().map(|b| self.apply_pair(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(rows.len(), cols.len(), |i, j| data[i][j]))
    }

    /// Vector with entries `f_i^z K(x, z)`.
    pub fn cross_vector(&self, x: Point, fs: &[Functional]) -> Result<DVector<f64>> {
        let dx = Functional::Eval(x);
        let v = fs.iter().map(|f| self.apply_pair(&dx, f)).collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(v))
    }
}

pub fn apply_pair(spec: &KernelSpec, a: &Functional, b: &Functional) -> Result<f64> {
    Kernel::new(*spec).apply_pair(a, b)
}

pub fn gram_matrix(spec: &KernelSpec, fs: &[Functional]) -> Result<DMatrix<f64>> {
    Kernel::new(*spec).gram_matrix(fs)
}

pub fn cross_vector(spec: &KernelSpec, x: Point, fs: &[Functional]) -> Result<DVector<f64>> {
    Kernel::new(*spec).cross_vector(x, fs)
}
