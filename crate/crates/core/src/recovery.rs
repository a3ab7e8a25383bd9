//! Direct linear recovery formulas and their worst-case error in a Sobolev space.
//!
//! A recovery row approximates `u(x)` by `sum_i c_i lambda_i(u)`. Its error functional
//! `delta_x - sum_i c_i lambda_i` has the dual norm
//!
//! ```text
//! |eps|^2 = K(x,x) - 2 sum_i c_i lambda_i^z K(x,z) + sum_ij c_i c_j lambda_i^y lambda_j^z K(y,z)
//! ```
//!
//! which bounds `|u(x) - u~(x)| <= |eps| * |u|_H` sharply. The weights minimising it solve the
//! Gram system `G c = k(x)`; that is the optimal recovery.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::{Functional, Kernel, KernelSpec, Point};
use crate::linalg::{FactorizationReport, SpdSolver};

#[derive(Clone, Debug)]
pub struct RecoveryRow {
    pub eval_point: Point,
    /// PDE functionals first, then boundary functionals.
    pub functionals: Arc<[Functional]>,
    pub weights: DVector<f64>,
    /// Factorisation of the system that produced the weights.
    pub system: FactorizationReport,
}

impl RecoveryRow {
    pub fn new(eval_point: Point, functionals: Arc<[Functional]>, weights: DVector<f64>, system: FactorizationReport) -> Result<Self> {
        if weights.len() != functionals.len() {
            return Err(Error::DimensionMismatch(format!("{} weights for {} functionals", weights.len(), functionals.len())));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Singular("recovery weights are not finite".into()));
        }
        Ok(Self { eval_point, functionals, weights, system })
    }

    pub fn zero(eval_point: Point, functionals: Arc<[Functional]>) -> Self {
        let n = functionals.len();
        Self { eval_point, functionals, weights: DVector::zeros(n), system: FactorizationReport::trivial() }
    }

    /// Apply the recovery to data `lambda_i(u)`.
    pub fn apply(&self, data: &DVector<f64>) -> f64 {
        self.weights.dot(data)
    }
}

/// Worst-case error of one method in one case for one Sobolev order.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub method: String,
    pub case: String,
    pub eval_order: u32,
    /// `NaN` when the cell could not be computed; see `reason`.
    pub norm: f64,
    pub condition: f64,
    pub jitter: f64,
    pub reason: Option<String>,
}

impl ErrorReport {
    pub const CSV_HEADER: &'static str = "method,case,eval_order,norm,condition,jitter,reason";

    pub fn failed(method: &str, case: &str, eval_order: u32, reason: impl Into<String>) -> Self {
        Self {
            method: method.into(),
            case: case.into(),
            eval_order,
            norm: f64::NAN,
            condition: f64::NAN,
            jitter: f64::NAN,
            reason: Some(reason.into()),
        }
    }

    pub fn is_computed(&self) -> bool {
        self.norm.is_finite()
    }

    pub fn csv_line(&self) -> String {
        let reason = self.reason.as_deref().unwrap_or("").replace([',', '\n'], ";");
        format!(
            "{},{},{},{},{},{},{}",
            self.method,
            self.case,
            self.eval_order,
            fmt_sci(self.norm),
            fmt_sci(self.condition),
            fmt_sci(self.jitter),
            reason
        )
    }
}

/// Scientific notation with 6 significant digits.
pub fn fmt_sci(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.5e}")
    }
}

/// Evaluates error norms for rows over a fixed functional list in one space.
#[derive(Clone)]
pub struct NormEvaluator {
    kernel: Kernel,
    functionals: Arc<[Functional]>,
    gram: Arc<DMatrix<f64>>,
}

impl NormEvaluator {
    pub fn new(spec: KernelSpec, functionals: Arc<[Functional]>) -> Result<Self> {
        let kernel = Kernel::new(spec);
        let gram = Arc::new(kernel.gram_matrix(&functionals)?);
        Ok(Self { kernel, functionals, gram })
    }

    pub fn with_cache(spec: KernelSpec, functionals: Arc<[Functional]>, cache: &GramCache) -> Result<Self> {
        let kernel = Kernel::new(spec);
        let gram = cache.get_or_insert(&kernel, &functionals)?;
        Ok(Self { kernel, functionals, gram })
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Unclamped value of the quadratic form.
    pub fn norm_squared_raw(&self, x: Point, weights: &DVector<f64>) -> Result<f64> {
        if weights.len() != self.functionals.len() {
            return Err(Error::DimensionMismatch(format!("{} weights for {} functionals", weights.len(), self.functionals.len())));
        }
        let kxx = self.kernel.value(x, x);
        let cross = self.kernel.cross_vector(x, &self.functionals)?;
        let quad = weights.dot(&(self.gram.as_ref() * weights));
        Ok(kxx - 2.0 * weights.dot(&cross) + quad)
    }

    pub fn norm(&self, row: &RecoveryRow) -> Result<f64> {
        if !Arc::ptr_eq(&row.functionals, &self.functionals) && row.functionals[..] != self.functionals[..] {
            return Err(Error::DimensionMismatch("row and evaluator use different functionals".into()));
        }
        let raw = self.norm_squared_raw(row.eval_point, &row.weights)?;
        Ok(clamp_root(raw))
    }
}

fn clamp_root(raw: f64) -> f64 {
    if raw < 0.0 {
        log::debug!("negative squared error norm {raw:e} clamped to zero");
        0.0
    } else {
        raw.sqrt()
    }
}

/// `|delta_x - sum_i c_i lambda_i|` in the dual of the space with kernel `spec`.
///
/// Functionals carrying a zero weight drop out of the quadratic form and are not assembled.
pub fn error_norm(spec: &KernelSpec, row: &RecoveryRow) -> Result<f64> {
    let active: Vec<usize> = (0..row.weights.len()).filter(|&i| row.weights[i] != 0.0).collect();
    let fs: Arc<[Functional]> = active.iter().map(|&i| row.functionals[i]).collect();
    let weights = DVector::from_iterator(active.len(), active.iter().map(|&i| row.weights[i]));
    let raw = NormEvaluator::new(*spec, fs)?.norm_squared_raw(row.eval_point, &weights)?;
    Ok(clamp_root(raw))
}

/// Factorised Gram system of a functional list, ready to produce optimal rows at any point.
pub struct OptimalSolver {
    kernel: Kernel,
    functionals: Arc<[Functional]>,
    solver: SpdSolver,
}

impl OptimalSolver {
    pub fn new(spec: KernelSpec, functionals: Arc<[Functional]>) -> Result<Self> {
        let kernel = Kernel::new(spec);
        let gram = kernel.gram_matrix(&functionals)?;
        Self::from_gram(kernel, functionals, &gram)
    }

    pub fn from_gram(kernel: Kernel, functionals: Arc<[Functional]>, gram: &DMatrix<f64>) -> Result<Self> {
        let solver = SpdSolver::factor(gram).map_err(|e| match e {
            Error::NotPositiveDefinite { max_jitter } => {
                Error::Singular(format!("Gram matrix not positive definite with jitter up to {max_jitter:e}"))
            }
            other => other,
        })?;
        Ok(Self { kernel, functionals, solver })
    }

    pub fn report(&self) -> FactorizationReport {
        self.solver.report
    }

    pub fn functionals(&self) -> &Arc<[Functional]> {
        &self.functionals
    }

    pub fn row_at(&self, x: Point) -> Result<RecoveryRow> {
        let k = self.kernel.cross_vector(x, &self.functionals)?;
        let c = self.solver.solve_vec(&k);
        RecoveryRow::new(x, self.functionals.clone(), c, self.solver.report)
    }
}

/// Weights minimising the error norm at `x`: the solution of `G c = k(x)`.
pub fn optimal_recovery(spec: &KernelSpec, x: Point, fs: &[Functional]) -> Result<RecoveryRow> {
    OptimalSolver::new(*spec, fs.into())?.row_at(x)
}

/// `sqrt(K(x,x) - c*^T k(x))`, valid only at the minimiser.
pub fn optimal_norm_direct(spec: &KernelSpec, x: Point, fs: &[Functional], c_star: &DVector<f64>) -> Result<f64> {
    Ok(clamp_root(optimal_norm_direct_squared(spec, x, fs, c_star)?))
}

pub fn optimal_norm_direct_squared(spec: &KernelSpec, x: Point, fs: &[Functional], c_star: &DVector<f64>) -> Result<f64> {
    if c_star.len() != fs.len() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} functionals", c_star.len(), fs.len())));
    }
    let kernel = Kernel::new(*spec);
    let k = kernel.cross_vector(x, fs)?;
    Ok(kernel.value(x, x) - c_star.dot(&k))
}

/// `max |lambda_i(c_k) - delta_ik|` where `rows[i]` is the recovery at the point of `fs[i]`.
///
/// For point evaluations `lambda_i(c_k)` is the `k`-th weight of the row built at `x_i`.
pub fn lagrange_check(_spec: &KernelSpec, fs: &[Functional], rows: &[RecoveryRow]) -> Result<f64> {
    if rows.len() != fs.len() {
        return Err(Error::DimensionMismatch(format!("{} rows for {} functionals", rows.len(), fs.len())));
    }
    let mut worst = 0.0f64;
    for (i, (f, row)) in fs.iter().zip(rows).enumerate() {
        if !f.is_evaluation() {
            return Err(Error::Domain("the Lagrange check runs on point evaluations only".into()));
        }
        if row.weights.len() != fs.len() {
            return Err(Error::DimensionMismatch("row length differs from functional count".into()));
        }
        for (k, &w) in row.weights.iter().enumerate() {
            let target = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((w - target).abs());
        }
    }
    Ok(worst)
}

/// `max |lambda_i(u_k) - delta_ik|` over the Lagrange basis `u_k` of the functionals `fs`.
///
/// `u_k = sum_j a_jk lambda_j^y K(., y)` with `G a_k = e_k`, so `lambda_i(u_k) = (G A)_ik`.
/// Works for any mix of evaluations and operator functionals.
pub fn lagrange_defect(spec: &KernelSpec, fs: &[Functional]) -> Result<f64> {
    let gram = Kernel::new(*spec).gram_matrix(fs)?;
    let solver = SpdSolver::factor(&gram)?;
    let n = fs.len();
    let basis = solver.solve(&DMatrix::identity(n, n));
    let applied = &gram * basis;
    Ok((applied - DMatrix::<f64>::identity(n, n)).amax())
}

fn functional_hash(fs: &[Functional]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    fs.len().hash(&mut h);
    for f in fs {
        f.key().hash(&mut h);
    }
    h.finish()
}

type CacheKey = ((u32, u32, u64), u64);
type CacheEntry = (Arc<[Functional]>, Arc<DMatrix<f64>>);

/// Gram matrices shared across methods that use the same functionals and space.
#[derive(Default)]
pub struct GramCache {
    entries: RwLock<HashMap<CacheKey, CacheEntry>>,
}

impl GramCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_insert(&self, kernel: &Kernel, fs: &Arc<[Functional]>) -> Result<Arc<DMatrix<f64>>> {
        let key = (kernel.spec().key(), functional_hash(fs));
        if let Some((stored, g)) = self.entries.read().expect("cache lock").get(&key) {
            if stored[..] == fs[..] {
                return Ok(g.clone());
            }
        }
        let g = Arc::new(kernel.gram_matrix(fs)?);
        let mut w = self.entries.write().expect("cache lock");
        let entry = w.entry(key).or_insert_with(|| (fs.clone(), g.clone()));
        Ok(entry.1.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Operator;
    use crate::mesh::{disk_case, DataVariant};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const ORIGIN: Point = [0.0, 0.0];

    fn case_functionals(level: u32, variant: DataVariant) -> Arc<[Functional]> {
        disk_case(level).point_sets(variant).functionals().into()
    }

    #[test]
    fn zero_row_has_norm_of_point_evaluation() {
        let spec = KernelSpec::sobolev(3).unwrap();
        let fs = case_functionals(0, DataVariant::Bary);
        let row = RecoveryRow::zero(ORIGIN, fs.clone());
        assert_eq!(error_norm(&spec, &row).unwrap(), 0.5);
        // a nonzero weight on a Laplacian datum is unbounded in order 3
        let mut w = DVector::zeros(fs.len());
        w[0] = 0.1;
        let row = RecoveryRow::new(ORIGIN, fs.clone(), w, FactorizationReport::trivial()).unwrap();
        assert!(matches!(error_norm(&spec, &row), Err(Error::OrderTooLow { .. })));
        let spec7 = KernelSpec::sobolev(7).unwrap();
        let row = RecoveryRow::zero(ORIGIN, fs);
        assert_eq!(error_norm(&spec7, &row).unwrap(), spec7.diagonal().sqrt());
    }

    #[test]
    fn exact_reproduction_at_boundary_point() {
        let spec = KernelSpec::sobolev(5).unwrap();
        let fs = case_functionals(1, DataVariant::Bary);
        let m = fs.iter().filter(|f| !f.is_evaluation()).count();
        let y1 = fs[m].point();
        let mut w = DVector::zeros(fs.len());
        w[m] = 1.0;
        let row = RecoveryRow::new(y1, fs, w, FactorizationReport::trivial()).unwrap();
        assert_eq!(error_norm(&spec, &row).unwrap(), 0.0);
    }

    #[test]
    fn self_reproduction() {
        let spec = KernelSpec::sobolev(4).unwrap();
        let x = [0.3, 0.4];
        let fs = [Functional::Eval(x)];
        let row = optimal_recovery(&spec, x, &fs).unwrap();
        assert_relative_eq!(row.weights[0], 1.0, max_relative = 1e-14);
        assert!(error_norm(&spec, &row).unwrap() < 1e-7);
        assert_eq!(optimal_norm_direct(&spec, x, &fs, &row.weights).unwrap(), 0.0);
    }

    #[test]
    fn optimal_table_values() {
        // (level, variant, order, published value)
        let cases = [
            (0, DataVariant::Bary, 4, 2.163e-2),
            (1, DataVariant::Node, 7, 6.116e-6),
            (2, DataVariant::Bary, 5, 3.106e-5),
        ];
        for (level, variant, order, want) in cases {
            let spec = KernelSpec::sobolev(order).unwrap();
            let fs = case_functionals(level, variant);
            let row = optimal_recovery(&spec, ORIGIN, &fs).unwrap();
            let got = error_norm(&spec, &row).unwrap();
            assert!((got - want).abs() <= 5e-4 * want + 1e-12, "C{level} {variant:?} order {order}: {got:e}");
            let direct = optimal_norm_direct(&spec, ORIGIN, &fs, &row.weights).unwrap();
            assert!((got - direct).abs() <= 1e-8 * spec.diagonal());
        }
    }

    #[test]
    fn spd_solve_matches_svd_solve_on_c0() {
        let spec = KernelSpec::sobolev(7).unwrap();
        let fs = case_functionals(0, DataVariant::Bary);
        let g = crate::kernel::gram_matrix(&spec, &fs).unwrap();
        let k = crate::kernel::cross_vector(&spec, ORIGIN, &fs).unwrap();
        let b = DMatrix::from_column_slice(k.len(), 1, k.as_slice());
        let (x_spd, _) = crate::linalg::solve_spd(&g, &b).unwrap();
        let (x_svd, _) = crate::linalg::pinv_apply(&g, 1e-15, &b).unwrap();
        assert!((x_spd - &x_svd).norm() <= 1e-9 * x_svd.norm());
        let eig = g.symmetric_eigenvalues();
        assert!(eig.min() > 0.0);
    }

    #[test]
    fn quadratic_form_nonnegative_for_random_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = KernelSpec::sobolev(5).unwrap();
        let fs = case_functionals(1, DataVariant::Node);
        let eval = NormEvaluator::new(spec, fs.clone()).unwrap();
        for _ in 0..500 {
            let scale = 10f64.powf(rng.gen_range(-4.0..1.0));
            let w = DVector::from_fn(fs.len(), |_, _| scale * rng.gen_range(-1.0..1.0));
            let raw = eval.norm_squared_raw(ORIGIN, &w).unwrap();
            assert!(raw >= -1e-10 * spec.diagonal());
        }
    }

    #[test]
    fn perturbing_the_optimum_never_helps() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (level, variant, order) in [(0, DataVariant::Bary, 5), (1, DataVariant::Node, 6), (1, DataVariant::Bary, 4)] {
            let spec = KernelSpec::sobolev(order).unwrap();
            let fs = case_functionals(level, variant);
            let row = optimal_recovery(&spec, ORIGIN, &fs).unwrap();
            let eval = NormEvaluator::new(spec, fs.clone()).unwrap();
            let best = eval.norm_squared_raw(ORIGIN, &row.weights).unwrap();
            for _ in 0..100 {
                let mut d = DVector::from_fn(fs.len(), |_, _| rng.gen_range(-1.0..1.0));
                d *= 1e-3 / d.norm();
                let perturbed = eval.norm_squared_raw(ORIGIN, &(&row.weights + d)).unwrap();
                assert!(perturbed >= best - 1e-15);
            }
        }
    }

    #[test]
    fn lagrange_property_single_and_boundary() {
        let spec = KernelSpec::sobolev(5).unwrap();
        let x = [0.1, 0.2];
        let fs = [Functional::Eval(x)];
        let rows = [optimal_recovery(&spec, x, &fs).unwrap()];
        assert!(lagrange_check(&spec, &fs, &rows).unwrap() < 1e-14);

        let bnd: Vec<Functional> = disk_case(0).point_sets(DataVariant::Bary).boundary.iter().map(|&p| Functional::Eval(p)).collect();
        let solver = OptimalSolver::new(spec, bnd.clone().into()).unwrap();
        let rows: Vec<_> = bnd.iter().map(|f| solver.row_at(f.point()).unwrap()).collect();
        assert!(lagrange_check(&spec, &bnd, &rows).unwrap() <= 1e-8);
    }

    #[test]
    fn lagrange_defect_with_operator_functionals() {
        let spec = KernelSpec::sobolev(5).unwrap();
        let fs = disk_case(0).point_sets(DataVariant::Bary).functionals();
        assert!(lagrange_defect(&spec, &fs).unwrap() <= 1e-9);
        let o3 = KernelSpec::sobolev(3).unwrap();
        assert!(lagrange_defect(&o3, &fs).is_err());
    }

    #[test]
    fn lagrange_rejects_operator_functionals() {
        let spec = KernelSpec::sobolev(5).unwrap();
        let f = Functional::Apply(Operator::MinusLaplacian, ORIGIN);
        let row = RecoveryRow::zero(ORIGIN, vec![f].into());
        assert!(lagrange_check(&spec, &[f], &[row]).is_err());
    }

    #[test]
    fn random_points_lagrange() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = KernelSpec::sobolev(4).unwrap();
        for _ in 0..5 {
            let fs: Vec<Functional> = (0..10)
                .map(|_| {
                    let (r, a) = (rng.gen_range(0.0..1.0f64).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
                    Functional::Eval([r * a.cos(), r * a.sin()])
                })
                .collect();
            let solver = OptimalSolver::new(spec, fs.clone().into()).unwrap();
            let rows: Vec<_> = fs.iter().map(|f| solver.row_at(f.point()).unwrap()).collect();
            assert!(lagrange_check(&spec, &fs, &rows).unwrap() <= 1e-7);
        }
    }

    #[test]
    fn gram_cache_reuses_matrices() {
        let cache = GramCache::new();
        let spec = KernelSpec::sobolev(6).unwrap();
        let fs = case_functionals(0, DataVariant::Node);
        let a = NormEvaluator::with_cache(spec, fs.clone(), &cache).unwrap();
        let b = NormEvaluator::with_cache(spec, fs.clone(), &cache).unwrap();
        assert_eq!(cache.len(), 1);
        assert!(std::ptr::eq(a.gram(), b.gram()));
        let _ = NormEvaluator::with_cache(KernelSpec::sobolev(5).unwrap(), fs, &cache).unwrap();
        assert_eq!(cache.len(), 2);
    }

    #[test]
    fn csv_line_format() {
        let r = ErrorReport {
            method: "OptBary".into(),
            case: "C1".into(),
            eval_order: 5,
            norm: 3.304e-4,
            condition: 1.0e8,
            jitter: 0.0,
            reason: None,
        };
        assert_eq!(r.csv_line(), "OptBary,C1,5,3.30400e-4,1.00000e8,0.00000e0,");
        let f = ErrorReport::failed("FEMBary", "C0", 3, "order too low, nu = 2");
        assert!(f.csv_line().starts_with("FEMBary,C0,3,NaN,NaN,NaN,order too low; nu = 2"));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn squared_norm_is_nonnegative(
            weights in proptest::collection::vec(-10.0f64..10.0, 41),
            x in (-0.7f64..0.7, -0.7f64..0.7),
            order in 4u32..8,
        ) {
            let spec = KernelSpec::sobolev(order).unwrap();
            let fs = case_functionals(1, DataVariant::Node);
            let eval = NormEvaluator::new(spec, fs).unwrap();
            let raw = eval.norm_squared_raw([x.0, x.1], &DVector::from_vec(weights)).unwrap();
            proptest::prop_assert!(raw >= -1e-10 * spec.diagonal());
        }
    }
}
