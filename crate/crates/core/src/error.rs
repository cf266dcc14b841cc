//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the solver toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The auxiliary-parameter interval is empty: |α⁻| is at or beyond the
    /// admissibility threshold for the requested coercivity system.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Two fields (or a field and an operator symbol) live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The electrostatic conjugate-gradient solve did not reach the requested
    /// relative residual. Carries the residual history for diagnosis.
    #[error("electrostatic solve failed to converge after {iterations} iterations (last residual {last:e})", iterations = .residual_history.len(), last = .residual_history.last().copied().unwrap_or(f64::NAN))]
    PhiSolve { residual_history: Vec<f64> },

    /// Energy stayed above −1 along the seed ray past the doubling cap; the
    /// functional does not exhibit the expected ray decay for this seed.
    #[error("descent endpoint search failed: J(t·seed) > -1 up to t = {t_reached:e}")]
    Geometry { t_reached: f64 },

    /// A solve was requested for parameters that fail the admissibility gate.
    #[error("parameters not admissible: {0}")]
    NotAdmissible(String),

    /// Eigen-decomposition failure (dimension bounds, non-convergence).
    #[error("eigensolver error: {0}")]
    Eigen(String),

    /// Adaptive quadrature failed to meet its tolerance.
    #[error("quadrature error: {0}")]
    Quadrature(String),

    /// Potential-expression parse or evaluation failure.
    #[error("potential expression error: {0}")]
    Expr(String),
}

pub type Result<T> = std::result::Result<T, Error>;
