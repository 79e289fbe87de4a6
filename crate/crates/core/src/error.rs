use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WignerError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("basis truncation n_max = {n_max} too small: tail log-weight {tail_log_weight:.3} above bound {bound:.3}")]
    Truncation {
        n_max: usize,
        tail_log_weight: f64,
        bound: f64,
    },

    #[error("quadrature budget exceeded: {points}^{dims} evaluations > {budget}")]
    BudgetExceeded { points: usize, dims: usize, budget: u64 },

    #[error("imaginary residue {residue:.3e} above tolerance {tolerance:.1e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("quadrature did not converge: achieved error estimate {estimate:.3e} > tolerance {tolerance:.3e}")]
    QuadratureNonConvergence { estimate: f64, tolerance: f64 },

    #[error("inside turning region |s/r - 1| = {distance:.3e} < {tolerance:.1e}")]
    TurningRegion { distance: f64, tolerance: f64 },

    #[error("inside origin region |alpha| = {modulus:.3e} < {limit:.3e}")]
    OriginRegion { modulus: f64, limit: f64 },

    #[error("Newton iteration did not converge after {iterations} steps; residual trace {trace:?}")]
    NewtonNonConvergence { iterations: usize, trace: Vec<f64> },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

impl WignerError {
    /// True for the turning-point and origin exclusion zones of the asymptotic formulas.
    pub fn is_region(&self) -> bool {
        matches!(self, WignerError::TurningRegion { .. } | WignerError::OriginRegion { .. })
    }
}

pub type Result<T> = std::result::Result<T, WignerError>;
