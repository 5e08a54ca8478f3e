//! Structural predicates for Hermitian, symplectic and Hamiltonian matrices.

use super::{check_even_square, check_square, fro, zeros, CMatrix, Tolerances, ONE};
use crate::error::{Error, Result};

/// The matrix `J_n = [[0, I], [-I, 0]]` of size `2n x 2n`.
pub fn make_j(n: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Dimension("make_j requires n >= 1".into()));
    }
    let mut j = zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = ONE;
        j[(n + i, i)] = -ONE;
    }
    Ok(j)
}

/// `|A - A^H| <= tol * max(1, |A|)` in the Frobenius norm.
pub fn is_hermitian(a: &CMatrix, tol: &Tolerances) -> Result<bool> {
    check_square(a, "is_hermitian input")?;
    let resid = (a - a.adjoint()).norm();
    Ok(resid <= tol.structural_tol * fro(a).max(1.0))
}

/// `S J S^H = J` within `tol * max(1, |S|^2)`.
pub fn is_symplectic(s: &CMatrix, tol: &Tolerances) -> Result<bool> {
    let n = check_even_square(s, "is_symplectic input")?;
    let j = make_j(n)?;
    let resid = (s * &j * s.adjoint() - &j).norm();
    let scale = fro(s);
    Ok(resid <= tol.structural_tol * (scale * scale).max(1.0))
}

/// `H J` Hermitian within tolerance.
pub fn is_hamiltonian(h: &CMatrix, tol: &Tolerances) -> Result<bool> {
    let n = check_even_square(h, "is_hamiltonian input")?;
    let j = make_j(n)?;
    is_hermitian(&(h * &j), tol)
}

/// `(A + A^H) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Projection onto the Hamiltonian matrices: `(A + J A^H J) / 2`.
///
/// A matrix is Hamiltonian exactly when `A = J A^H J`.
pub fn hamiltonian_part(a: &CMatrix) -> Result<CMatrix> {
    let n = check_even_square(a, "hamiltonian_part input")?;
    let j = make_j(n)?;
    Ok((a + &j * a.adjoint() * &j).scale(0.5))
}
