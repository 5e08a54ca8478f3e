use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Thresholds used by every structural predicate and decomposition.
///
/// All predicates work with relative residuals so that rescaling a matrix
/// never changes a verdict.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative residual bound for structural predicates.
    pub structural_tol: f64,
    /// Singular-value cutoff relative to the largest singular value.
    pub rank_tol: f64,
    /// Generalized eigenvalues with `|alpha/beta|` below this count as zero.
    pub eig_zero_tol: f64,
    /// Generalized eigenvalues with `|alpha/beta|` above this count as infinite.
    pub eig_inf_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural_tol: 1e-8,
            rank_tol: 1e-10,
            eig_zero_tol: 1e-8,
            eig_inf_tol: 1e8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.structural_tol > 0.0
            && self.rank_tol > 0.0
            && self.eig_zero_tol > 0.0
            && self.eig_inf_tol > 0.0;
        if !all_positive {
            return Err(Error::Input("tolerances must be positive".into()));
        }
        if self.rank_tol > self.structural_tol {
            return Err(Error::Input(
                "rank_tol must not exceed structural_tol".into(),
            ));
        }
        Ok(())
    }
}
