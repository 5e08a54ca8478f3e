//! Matrix logarithm via Schur reduction and inverse scaling and squaring.
//!
//! The branch cut defaults to the ray at angle pi; when an eigenvalue sits
//! within 1e-6 radians of the cut, the cut is rotated into the widest angular
//! gap of the spectrum. For symplectic input the result is projected to be
//! exactly Hamiltonian, so `Log` maps the symplectic group onto Hamiltonian
//! matrices.

use super::{
    check_square, fro, hamiltonian_part, identity, is_symplectic, schur_form, solve, CMatrix,
    Tolerances, ONE,
};
use crate::error::{Error, Result};
use num_complex::Complex64;

const CUT_CLEARANCE: f64 = 1e-6;

/// 8-point Gauss-Legendre rule on [0, 1]; equivalent to the diagonal [8/8]
/// Pade approximant of log(1 + x).
const GL_NODES: [f64; 8] = [
    0.019855071751231884,
    0.101666761293186630,
    0.237233795041835507,
    0.408282678752175097,
    0.591717321247824903,
    0.762766204958164493,
    0.898333238706813370,
    0.980144928248768116,
];
const GL_WEIGHTS: [f64; 8] = [
    0.050614268145188130,
    0.111190517226687235,
    0.156853322938943644,
    0.181341891689180991,
    0.181341891689180991,
    0.156853322938943644,
    0.111190517226687235,
    0.050614268145188130,
];

fn wrap_angle(x: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut y = x % two_pi;
    if y > std::f64::consts::PI {
        y -= two_pi;
    } else if y <= -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

/// Pick the branch-cut angle: the default ray at pi unless an eigenvalue is
/// within `CUT_CLEARANCE` of it, in which case the midpoint of the widest
/// angular gap of the spectrum is used.
fn choose_cut(eigs: &[Complex64]) -> Result<f64> {
    let pi = std::f64::consts::PI;
    let dist_to = |theta: f64| {
        eigs.iter()
            .map(|l| wrap_angle(l.arg() - theta).abs())
            .fold(f64::INFINITY, f64::min)
    };
    if dist_to(pi) > CUT_CLEARANCE {
        return Ok(pi);
    }
    let mut angles: Vec<f64> = eigs.iter().map(|l| l.arg()).collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best_gap = 0.0;
    let mut best_theta = pi;
    for i in 0..angles.len() {
        let a = angles[i];
        let b = if i + 1 < angles.len() {
            angles[i + 1]
        } else {
            angles[0] + std::f64::consts::TAU
        };
        if b - a > best_gap {
            best_gap = b - a;
            best_theta = wrap_angle(0.5 * (a + b));
        }
    }
    if best_gap / 2.0 <= CUT_CLEARANCE {
        return Err(Error::BranchCut { gap: best_gap / 2.0 });
    }
    Ok(best_theta)
}

/// Principal square root of an upper triangular matrix (Bjorck-Hammarling).
fn sqrtm_triangular(t: &CMatrix) -> Result<CMatrix> {
    let n = t.nrows();
    let mut s = CMatrix::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = t[(i, i)].sqrt();
    }
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            let mut acc = t[(i, j)];
            for k in i + 1..j {
                acc -= s[(i, k)] * s[(k, j)];
            }
            let denom = s[(i, i)] + s[(j, j)];
            if denom.norm() == 0.0 {
                return Err(Error::NumericalBreakdown(
                    "triangular square root: zero diagonal pair".into(),
                ));
            }
            s[(i, j)] = acc / denom;
        }
    }
    Ok(s)
}

fn log_near_identity(x: &CMatrix) -> Result<CMatrix> {
    let n = x.nrows();
    let mut acc = CMatrix::zeros(n, n);
    for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        let denom = identity(n) + x.scale(*node);
        acc += solve(&denom, x)?.scale(*weight);
    }
    Ok(acc)
}

/// A logarithm `L` of `a` with `mat_exp(L) = a`, using the rotated branch cut
/// described in the module docs. For symplectic `a` (checked with default
/// tolerances) the result is Hamiltonian-projected.
pub fn mat_log(a: &CMatrix) -> Result<CMatrix> {
    check_square(a, "mat_log input")?;
    let n = a.nrows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let (q, t) = schur_form(a)?;
    let eigs: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = fro(a).max(f64::MIN_POSITIVE);
    if eigs.iter().any(|l| l.norm() <= 1e-14 * scale) {
        return Err(Error::Singularity("mat_log of a singular matrix".into()));
    }

    let theta = choose_cut(&eigs)?;
    let phi = std::f64::consts::PI - theta;
    let rot = Complex64::new(0.0, phi).exp();
    let mut tri = t.scale_complex(rot);

    let mut sqrt_count = 0u32;
    loop {
        let dist = (&tri - identity(n)).norm();
        if dist <= 0.25 || sqrt_count >= 80 {
            break;
        }
        tri = sqrtm_triangular(&tri)?;
        sqrt_count += 1;
    }
    let x = &tri - identity(n);
    let log_tri = log_near_identity(&x)?.scale(2.0f64.powi(sqrt_count as i32));

    let mut log_a = &q * log_tri * q.adjoint();
    log_a -= identity(n).scale_complex(Complex64::new(0.0, phi));

    if n % 2 == 0 && is_symplectic(a, &Tolerances::default())? {
        log_a = hamiltonian_part(&log_a)?;
    }
    Ok(log_a)
}

trait ScaleComplex {
    fn scale_complex(&self, c: Complex64) -> CMatrix;
}

impl ScaleComplex for CMatrix {
    fn scale_complex(&self, c: Complex64) -> CMatrix {
        self.map(|x| x * c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        is_hamiltonian, mat_exp, random_instance, rel_err, zeros, RandomKind,
    };

    #[test]
    fn log_of_identity_is_zero() {
        assert!(mat_log(&identity(3)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn log_of_diagonal() {
        let mut d = zeros(2, 2);
        d[(0, 0)] = ONE.scale(1.0f64.exp());
        d[(1, 1)] = ONE.scale((-1.0f64).exp());
        let l = mat_log(&d).unwrap();
        assert!((l[(0, 0)] - ONE).norm() < 1e-12);
        assert!((l[(1, 1)] + ONE).norm() < 1e-12);
    }

    #[test]
    fn log_exp_roundtrip_on_small_hamiltonian() {
        for seed in [4u64, 9, 23] {
            let mut h = random_instance(RandomKind::Hamiltonian, 3, seed);
            h = h.scale(0.8 / h.norm());
            let s = mat_exp(&h).unwrap();
            let l = mat_log(&s).unwrap();
            assert!(rel_err(&l, &h) < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn log_of_symplectic_is_exactly_hamiltonian() {
        let tol = Tolerances::default();
        for seed in [7u64, 40] {
            let s = random_instance(RandomKind::Symplectic, 3, seed);
            let l = mat_log(&s).unwrap();
            // Exact by projection: residual at machine precision.
            let strict = Tolerances {
                structural_tol: 1e-13,
                rank_tol: 1e-14,
                ..tol
            };
            assert!(is_hamiltonian(&l, &strict).unwrap());
            let back = mat_exp(&l).unwrap();
            assert!((back - &s).norm() <= 1e-8 * s.norm());
        }
    }

    #[test]
    fn log_rotates_cut_off_negative_axis() {
        // Eigenvalues on the negative real axis force a rotated cut.
        let mut d = zeros(2, 2);
        d[(0, 0)] = ONE.scale(-1.0);
        d[(1, 1)] = ONE.scale(-0.5);
        let l = mat_log(&d).unwrap();
        let back = mat_exp(&l).unwrap();
        assert!(rel_err(&back, &d) < 1e-12);
    }

    #[test]
    fn log_of_singular_rejected() {
        let mut d = zeros(2, 2);
        d[(0, 0)] = ONE;
        assert!(matches!(mat_log(&d), Err(Error::Singularity(_))));
    }
}
