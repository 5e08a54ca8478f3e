//! Dense complex matrix kernels and structural predicates.

mod expm;
mod json;
mod logm;
mod predicates;
mod qz;
mod random;
mod tolerances;

pub use expm::mat_exp;
pub use json::MatrixJson;
pub use logm::mat_log;
pub use predicates::{
    hamiltonian_part, hermitian_part, is_hamiltonian, is_hermitian, is_symplectic, make_j,
};
pub use qz::{qz_decompose, qz_reorder, GeneralizedSchur};
pub use random::{random_instance, RandomKind};
pub use tolerances::Tolerances;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Complex scalar from a real.
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Frobenius norm.
pub fn fro(a: &CMatrix) -> f64 {
    a.norm()
}

/// Relative Frobenius distance `|a - b| / max(1, |b|)`.
pub fn rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Singular values, descending. nalgebra does not guarantee an order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Smallest singular value; zero for an empty matrix.
pub fn smallest_singular(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    singular_values(a).last().copied().unwrap()
}

/// Numerical rank relative to the largest singular value.
pub fn rank(a: &CMatrix, tol: &Tolerances) -> usize {
    let sv = singular_values(a);
    let cutoff = tol.rank_tol * sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Orthonormal basis of the null space (right singular vectors below the
/// rank cutoff), as columns.
pub fn null_space(a: &CMatrix, tol: &Tolerances) -> CMatrix {
    let n = a.ncols();
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("svd requested v_t");
    let mut pairs: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    // v_t may have fewer rows than n for wide matrices; missing directions are
    // exact null vectors but do not occur for the square inputs used here.
    assert_eq!(vt.nrows(), n, "null_space expects a square or tall matrix");
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let smax = pairs.first().map(|p| p.0).unwrap_or(0.0);
    let cutoff = tol.rank_tol * smax;
    let null_idx: Vec<usize> = pairs
        .iter()
        .filter(|(s, _)| *s <= cutoff)
        .map(|(_, i)| *i)
        .collect();
    let mut out = zeros(n, null_idx.len());
    for (k, &i) in null_idx.iter().enumerate() {
        out.set_column(k, &vt.row(i).adjoint());
    }
    out
}

/// Solve `a x = b` by LU with partial pivoting.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let lu = a.clone().lu();
    lu.solve(b)
        .ok_or_else(|| Error::Singularity(format!("{}x{} system matrix", a.nrows(), a.ncols())))
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    solve(a, &identity(a.nrows()))
}

/// Solve `x a = b`, i.e. `a^T x^T = b^T`.
pub fn solve_right(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    Ok(solve(&a.transpose(), &b.transpose())?.transpose())
}

/// Eigenvalues of a general complex matrix, from the Schur form.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let t = schur_form(a)?.1;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Complex Schur decomposition `a = q t q^H` with `t` upper triangular.
pub fn schur_form(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::NoConvergence("Schur iteration".into()))?;
    let (q, t) = schur.unpack();
    Ok((q, t))
}

/// `a^(2^k)` by repeated squaring.
pub fn pow2(a: &CMatrix, k: u32) -> CMatrix {
    let mut out = a.clone();
    for _ in 0..k {
        out = &out * &out;
    }
    out
}

pub(crate) fn check_square(a: &CMatrix, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn check_even_square(a: &CMatrix, what: &str) -> Result<usize> {
    check_square(a, what)?;
    if a.nrows() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "{what} must have even dimension, got {}",
            a.nrows()
        )));
    }
    Ok(a.nrows() / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_singular_identity_is_one() {
        assert!((smallest_singular(&identity(4)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn smallest_singular_rank_deficient_is_zero() {
        let mut a = zeros(2, 2);
        a[(0, 0)] = ONE;
        assert!(smallest_singular(&a) < 1e-14);
    }

    #[test]
    fn smallest_singular_of_unitary_is_one() {
        // QR-orthonormalization of a random matrix gives a unitary factor.
        let b = random_instance(RandomKind::Hermitian, 3, 99);
        let q = b.qr().q();
        assert!((smallest_singular(&q) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_matches_kernel() {
        let tol = Tolerances::default();
        let mut a = zeros(3, 3);
        a[(0, 0)] = ONE;
        a[(1, 1)] = ONE;
        let ns = null_space(&a, &tol);
        assert_eq!(ns.ncols(), 1);
        assert!((&a * &ns).norm() < 1e-14);
        assert_eq!(rank(&a, &tol), 2);
    }

    #[test]
    fn solve_right_transposed_system() {
        let a = random_instance(RandomKind::Hermitian, 3, 5)
            + identity(3) * Complex64::new(4.0, 0.0);
        let b = random_instance(RandomKind::Hermitian, 3, 6);
        let x = solve_right(&a, &b).unwrap();
        assert!(rel_err(&(&x * &a), &b) < 1e-12);
    }
}
