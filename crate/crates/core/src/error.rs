//! Error type shared by all solver modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    /// Invalid user-supplied parameters (grid counts, bounds, time step...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Operands live on different grids or refer to mismatched materials.
    #[error("dimension mismatch: {0}")]
    Mismatch(String),

    /// Dense closed forms are only printed for derivative orders p <= 5.
    #[error("unsupported derivative order p = {0} (dense forms exist for 1 <= p <= 5)")]
    UnsupportedOrder(u32),

    /// The dense oracle path refuses problems past its size guard.
    #[error("dense solve guard: {got} unknowns exceeds the oracle limit of {limit}")]
    SizeGuard { got: usize, limit: usize },

    /// An internal identity failed (conjugate symmetry, invertibility...);
    /// indicates a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
