use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside domain: {0}")]
    Domain(String),

    /// The requested number of Laplacians is not finite on the diagonal of the kernel.
    #[error("Sobolev order too low: nu = {nu} cannot carry {laplacians} Laplacian(s)")]
    OrderTooLow { nu: u32, laplacians: u32 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix not positive definite even with jitter {max_jitter:e}")]
    NotPositiveDefinite { max_jitter: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("point ({0}, {1}) is not covered by the mesh")]
    OutsideMesh(f64, f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
