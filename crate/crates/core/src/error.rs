use crate::kernel::KernelError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    /// The step left the set of rank-p matrices.
    #[error("rank boundary: smallest retained value {sigma_min:.3e}, largest {sigma_max:.3e}")]
    Boundary { sigma_min: f64, sigma_max: f64 },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
