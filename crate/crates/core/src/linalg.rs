//! Dense SPD and SVD solves, a small CSR type for the local-stencil systems, and
//! condition estimates for reporting.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU, SVD};

use crate::error::{Error, Result};

/// Relative jitter levels tried after a failed Cholesky factorisation, as fractions of `trace / N`.
pub const JITTER_START: f64 = 1e-12;
pub const JITTER_MAX: f64 = 1e-6;

const POWER_ITERATIONS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorizationMethod {
    Spd,
    SpdJitter,
    Svd,
    Lu,
}

impl FactorizationMethod {
    pub fn name(self) -> &'static str {
        match self {
            FactorizationMethod::Spd => "spd",
            FactorizationMethod::SpdJitter => "spd+jitter",
            FactorizationMethod::Svd => "svd",
            FactorizationMethod::Lu => "lu",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FactorizationReport {
    pub method: FactorizationMethod,
    /// Absolute diagonal shift added before factorising.
    pub jitter_used: f64,
    pub condition_estimate: f64,
    pub truncated_rank: Option<usize>,
}

impl FactorizationReport {
    /// Report for a system that needed no factorisation.
    pub fn trivial() -> Self {
        Self { method: FactorizationMethod::Spd, jitter_used: 0.0, condition_estimate: 1.0, truncated_rank: None }
    }
}

fn unit_start(n: usize) -> DVector<f64> {
    // deterministic start vector with no special alignment
    DVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7919 % 101) as f64 / 101.0))
}

/// Largest eigenvalue of a symmetric operator by power iteration.
fn power_max(n: usize, apply: impl Fn(&DVector<f64>) -> DVector<f64>) -> f64 {
    let mut v = unit_start(n);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = apply(&v);
        lambda = v.dot(&w);
        let norm = w.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        v = w / norm;
    }
    lambda.abs()
}

fn clamp_condition(c: f64) -> f64 {
    if c.is_nan() {
        f64::INFINITY
    } else {
        c.max(1.0)
    }
}

/// A Cholesky factor with the jitter escalation policy applied.
pub struct SpdSolver {
    chol: Cholesky<f64, Dyn>,
    pub report: FactorizationReport,
}

impl SpdSolver {
    pub fn factor(a: &DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("SPD solve needs a square matrix, got {}x{}", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        if n == 0 {
            let chol = Cholesky::new(DMatrix::<f64>::zeros(0, 0)).expect("empty factor");
            return Ok(Self { chol, report: FactorizationReport::trivial() });
        }
        let (chol, method, jitter) = match Cholesky::new(a.clone()) {
            Some(c) => (c, FactorizationMethod::Spd, 0.0),
            None => {
                let base = a.trace().abs() / n as f64;
                let mut level = JITTER_START;
                loop {
                    let shift = level * base;
                    let mut shifted = a.clone();
                    for i in 0..n {
                        shifted[(i, i)] += shift;
                    }
                    if let Some(c) = Cholesky::new(shifted) {
                        log::debug!("Cholesky needed jitter {shift:e}");
                        break (c, FactorizationMethod::SpdJitter, shift);
                    }
                    level *= 10.0;
                    if level > JITTER_MAX * (1.0 + 1e-9) {
                        return Err(Error::NotPositiveDefinite { max_jitter: JITTER_MAX * base });
                    }
                }
            }
        };
        let lambda_max = power_max(n, |v| a * v) + jitter;
        let inv_min = power_max(n, |v| chol.solve(v));
        let condition_estimate = clamp_condition(lambda_max * inv_min);
        Ok(Self { chol, report: FactorizationReport { method, jitter_used: jitter, condition_estimate, truncated_rank: None } })
    }

    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }
}

/// Solve `A x = b` for symmetric `A` by Cholesky with diagonal jitter on failure.
pub fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(DMatrix<f64>, FactorizationReport)> {
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch(format!("rhs has {} rows, matrix {}", b.nrows(), a.nrows())));
    }
    let s = SpdSolver::factor(a)?;
    Ok((s.solve(b), s.report))
}

/// Truncated singular value decomposition used as a pseudoinverse.
pub struct PseudoInverse {
    u: DMatrix<f64>,
    inv_s: DVector<f64>,
    v_t: DMatrix<f64>,
    pub report: FactorizationReport,
}

impl PseudoInverse {
    /// Singular values below `tol * sigma_max` are dropped.
    pub fn new(a: &DMatrix<f64>, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("pseudoinverse tolerance must be positive, got {tol}")));
        }
        let svd = SVD::new(a.clone(), true, true);
        let s = svd.singular_values;
        let sigma_max = s.max();
        let cut = tol * sigma_max;
        let rank = s.iter().filter(|&&v| v > cut).count();
        let inv_s = s.map(|v| if v > cut { 1.0 / v } else { 0.0 });
        let sigma_min_kept = s.iter().copied().filter(|&v| v > cut).fold(f64::INFINITY, f64::min);
        let condition_estimate = if rank == 0 { 1.0 } else { clamp_condition(sigma_max / sigma_min_kept) };
        if rank < s.len() {
            log::debug!("pseudoinverse truncated rank {} of {}", rank, s.len());
        }
        Ok(Self {
            u: svd.u.expect("u requested"),
            inv_s,
            v_t: svd.v_t.expect("v_t requested"),
            report: FactorizationReport {
                method: FactorizationMethod::Svd,
                jitter_used: 0.0,
                condition_estimate,
                truncated_rank: Some(rank),
            },
        })
    }

    /// `A^+ b`.
    pub fn apply(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut t = self.u.transpose() * b;
        for (i, mut row) in t.row_iter_mut().enumerate() {
            row *= self.inv_s[i];
        }
        self.v_t.transpose() * t
    }

    /// `(A^+)^T e`, i.e. the row vector `e^T A^+` as a column.
    pub fn apply_transpose(&self, e: &DVector<f64>) -> DVector<f64> {
        let mut t = &self.v_t * e;
        t.component_mul_assign(&self.inv_s);
        &self.u * t
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.apply(&DMatrix::identity(self.u.nrows(), self.u.nrows()))
    }
}

/// Minimum-norm least-squares solution with relative singular value cutoff `tol`.
pub fn pinv_apply(a: &DMatrix<f64>, tol: f64, b: &DMatrix<f64>) -> Result<(DMatrix<f64>, FactorizationReport)> {
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch(format!("rhs has {} rows, matrix {}", b.nrows(), a.nrows())));
    }
    let p = PseudoInverse::new(a, tol)?;
    Ok((p.apply(b), p.report))
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from per-row `(column, value)` lists; duplicate columns are summed.
    pub fn from_rows(ncols: usize, rows: &[Vec<(usize, f64)>]) -> Self {
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for row in rows {
            let mut entries = row.clone();
            entries.sort_by_key(|&(c, _)| c);
            for (c, v) in entries {
                assert!(c < ncols, "column {c} out of range");
                if col_idx.len() > *row_ptr.last().unwrap() && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { nrows: rows.len(), ncols, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.nrows, |i, _| self.row(i).map(|(c, v)| v * x[c]).sum())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (c, v) in self.row(i) {
                m[(i, c)] += v;
            }
        }
        m
    }
}

/// LU factorisation of a square (possibly nonsymmetric) system.
pub struct LuSolver {
    lu: LU<f64, Dyn, Dyn>,
    pub report: FactorizationReport,
}

impl LuSolver {
    pub fn factor(a: &DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU needs a square matrix, got {}x{}", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        let lu = LU::new(a.clone());
        if n > 0 && !lu.is_invertible() {
            return Err(Error::Singular("LU factorisation hit a zero pivot".into()));
        }
        let sigma_max2 = power_max(n, |v| a.transpose() * (a * v));
        let inv_sigma_min2 = power_max(n, |v| {
            let w = lu.solve(v).unwrap_or_else(|| v.clone());
            lu_solve_transpose(&lu, &w)
        });
        let condition_estimate = clamp_condition((sigma_max2 * inv_sigma_min2).sqrt());
        Ok(Self { lu, report: FactorizationReport { method: FactorizationMethod::Lu, jitter_used: 0.0, condition_estimate, truncated_rank: None } })
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        self.lu.solve(b).ok_or_else(|| Error::Singular("LU solve failed".into()))
    }

    /// Solve `A^T y = b`.
    pub fn solve_transpose(&self, b: &DVector<f64>) -> DVector<f64> {
        lu_solve_transpose(&self.lu, b)
    }
}

fn lu_solve_transpose(lu: &LU<f64, Dyn, Dyn>, b: &DVector<f64>) -> DVector<f64> {
    // P A = L U  =>  A^T = U^T L^T P
    let l = lu.l();
    let u = lu.u();
    let z = u.transpose().solve_lower_triangular(b).expect("nonzero pivots");
    let mut y = l.transpose().solve_upper_triangular(&z).expect("unit diagonal");
    lu.p().inv_permute_rows(&mut y);
    y
}

/// Solve a sparse square system; the factorisation itself is dense.
pub fn solve_sparse(a: &CsrMatrix, b: &DVector<f64>) -> Result<(DVector<f64>, FactorizationReport)> {
    let s = LuSolver::factor(&a.to_dense())?;
    Ok((s.solve(b)?, s.report))
}
