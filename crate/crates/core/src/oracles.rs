//! Independent cross-check routes used by the test suites.
//!
//! Everything here deliberately avoids the code paths it is used to verify:
//! the CARE solver goes through an invariant subspace instead of the Cayley
//! bridge, the scalar solutions are closed forms, and the slope fit is plain
//! least squares on log-log samples.

use crate::error::Result;
use crate::linalg::{
    hermitian_part, identity, qz_decompose, qz_reorder, solve, zeros, CMatrix, RandomKind,
    Tolerances,
};
use crate::sda::CareProblem;
use num_complex::Complex64;

/// Roots of the scalar NME `x + a^2 / x = q`, largest first.
pub fn scalar_nme_roots(a: f64, q: f64) -> (f64, f64) {
    let disc = (q * q - 4.0 * a * a).sqrt();
    ((q + disc) / 2.0, (q - disc) / 2.0)
}

/// Closed form of the scalar Riccati flow `w' = -w^2`, `w(0) = w0`, which is
/// the flow of the Hamiltonian `[[0, 1], [0, 0]]`.
pub fn scalar_parabolic_rde(w0: f64, t: f64) -> Option<f64> {
    let q = 1.0 + w0 * t;
    if q.abs() < 1e-12 {
        None
    } else {
        Some(w0 / q)
    }
}

/// Stabilizing CARE solution `-XGX + A^H X + X A + H = 0` from the stable
/// invariant subspace of the Hamiltonian `[[A, -G], [-H, -A^H]]`.
pub fn care_oracle(a: &CMatrix, g: &CMatrix, h: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let mut k = zeros(2 * n, 2 * n);
    k.view_mut((0, 0), (n, n)).copy_from(a);
    k.view_mut((0, n), (n, n)).copy_from(&(-g));
    k.view_mut((n, 0), (n, n)).copy_from(&(-h));
    k.view_mut((n, n), (n, n)).copy_from(&(-a.adjoint()));
    let mut gs = qz_decompose(&k, &identity(2 * n))?;
    let select: Vec<bool> = gs
        .eigen_pairs()
        .iter()
        .map(|(al, be)| (al / be).re < 0.0)
        .collect();
    let picked = qz_reorder(&mut gs, &select);
    if picked != n {
        return Err(crate::error::Error::NoConvergence(format!(
            "CARE oracle: {picked} stable eigenvalues instead of {n}"
        )));
    }
    let z11 = CMatrix::from(gs.z.view((0, 0), (n, n)));
    let z21 = CMatrix::from(gs.z.view((n, 0), (n, n)));
    let x = crate::linalg::solve_right(&z11, &z21)?;
    Ok(hermitian_part(&x))
}

/// Seeded CARE instance with definite `G`, `H`, generically stabilizable.
pub fn random_definite_care(n: usize, seed: u64) -> CareProblem {
    let tol = Tolerances::default();
    let b = crate::linalg::random_instance(RandomKind::Hermitian, n, seed)
        + crate::linalg::random_instance(RandomKind::Hermitian, n, seed + 17)
            .map(|x| x * Complex64::new(0.0, 1.0));
    let a = &b - identity(n).scale(0.5);
    let c = crate::linalg::random_instance(RandomKind::Hermitian, n, seed + 1);
    let g = &c * c.adjoint() + identity(n).scale(0.1);
    let d = crate::linalg::random_instance(RandomKind::Hermitian, n, seed + 2);
    let h = &d * d.adjoint() + identity(n).scale(0.1);
    CareProblem::new(a, g, h, &tol).expect("construction is Hermitian")
}

/// Seeded random matrix rescaled to spectral norm about one half.
pub fn random_contraction(n: usize, seed: u64) -> CMatrix {
    let m = crate::linalg::random_instance(RandomKind::Hermitian, n, seed)
        + crate::linalg::random_instance(RandomKind::Hermitian, n, seed + 29)
            .map(|x| x * Complex64::new(0.0, 1.0));
    let top = crate::linalg::singular_values(&m)[0];
    m.map(|x| x * Complex64::new(0.5 / top.max(1e-12), 0.0))
}

/// Central difference `(f(t + h) - f(t - h)) / 2h`.
pub fn central_difference(
    f: impl Fn(f64) -> Result<CMatrix>,
    t: f64,
    h: f64,
) -> Result<CMatrix> {
    let plus = f(t + h)?;
    let minus = f(t - h)?;
    Ok((plus - minus).map(|x| x / Complex64::new(2.0 * h, 0.0)))
}

/// Least-squares slope of `log(y)` against `log(x)`; ignores non-finite and
/// non-positive samples.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys.iter())
        .filter(|(&x, &y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Degree of `det(M - lambda L)` estimated by sampling the determinant on a
/// circle and reading off which polynomial coefficients are live.
pub fn pencil_degree(m: &CMatrix, l: &CMatrix, radius: f64) -> usize {
    let n = m.nrows();
    let samples = 2 * n + 2;
    let dets: Vec<Complex64> = (0..samples)
        .map(|k| {
            let ang = std::f64::consts::TAU * k as f64 / samples as f64;
            let lambda = Complex64::from_polar(radius, ang);
            (m - l.map(|x| x * lambda)).determinant()
        })
        .collect();
    // inverse DFT gives the coefficients of det as a polynomial in lambda
    let mut best = 0usize;
    let mut coeffs = vec![0.0f64; samples];
    for (deg, c) in coeffs.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, d) in dets.iter().enumerate() {
            let ang = -std::f64::consts::TAU * (k * deg) as f64 / samples as f64;
            acc += d * Complex64::from_polar(1.0, ang);
        }
        *c = (acc / samples as f64).norm() / radius.powi(deg as i32);
    }
    let top = coeffs.iter().cloned().fold(0.0, f64::max);
    for (deg, c) in coeffs.iter().enumerate().take(n + 1) {
        if *c > 1e-8 * top {
            best = deg;
        }
    }
    best
}

/// Solve `a x = b`, panicking on singularity; test convenience.
pub fn must_solve(a: &CMatrix, b: &CMatrix) -> CMatrix {
    solve(a, b).expect("solvable system")
}
