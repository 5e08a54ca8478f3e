//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("singular matrix: {0}")]
    Singularity(String),

    #[error("eigenvalue too close to the logarithm branch cut (min angular gap {gap:.3e})")]
    BranchCut { gap: f64 },

    #[error("overflow in matrix exponential (norm {norm:.3e})")]
    Overflow { norm: f64 },

    #[error("matrix pair has index at infinity >= 2")]
    IndexTooHigh,

    #[error("matrix pair is not regular")]
    NotRegular,

    #[error("pair is not normalizable in this class: {0}")]
    NotInClass(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("doubling step breakdown: sigma_min = {sigma_min:.3e}")]
    Breakdown { sigma_min: f64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("invalid Jordan specification: {0}")]
    Spec(String),

    #[error("hypothesis failure: {matrix} is singular (sigma_min = {sigma_min:.3e})")]
    Hypothesis { matrix: String, sigma_min: f64 },

    #[error("assumption {which} fails (sigma_min = {sigma_min:.3e})")]
    Assumption { which: String, sigma_min: f64 },

    #[error("evaluation at a pole of the periodic orbit (|1 + e^(i theta t) c| = {value:.3e})")]
    Pole { value: f64 },

    #[error("linear system has no solution at t = {t}")]
    NoSolution { t: f64 },

    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),

    #[error("invalid input: {0}")]
    Input(String),
}
