//! Error-norm comparison of linear solvers for the Poisson problem on the unit disk.
//!
//! Any linear method that turns PDE data `f = -Delta u` and Dirichlet data `g = u` into an
//! approximate value `u(x)` does so through a row of weights on the data functionals. The
//! worst-case error of that row over the unit ball of a Sobolev space is a quadratic form in
//! the weights built from a Whittle-Matern kernel, so methods can be ranked without test
//! problems. The optimal row in each space is the kernel-based recovery.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod mesh;
pub mod recovery;
pub mod solvers;
pub mod special;

pub use error::{Error, Result};
pub use kernel::{Functional, Kernel, KernelSpec, Operator, Point};
pub use mesh::{disk_case, DataVariant, DiskMesh};
pub use recovery::{error_norm, optimal_recovery, ErrorReport, RecoveryRow};
pub use solvers::{prepare, Method, MethodConfig, RecoveryMethod};
