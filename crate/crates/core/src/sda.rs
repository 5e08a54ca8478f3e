//! Structure-preserving doubling algorithms.
//!
//! SDA-1 iterates `(A_k, G_k, H_k)` toward the stabilizing solution of the
//! DARE `X = A^H X (I + G X)^{-1} A + H`; SDA-2 iterates `(A_k, Q_k, P_k)`
//! toward the extremal solutions of the NME `X + A^H X^{-1} A = Q`. CAREs
//! are bridged to DAREs by a Cayley transformation. Each step squares the
//! eigenvalues of the underlying pencil, so the iterates sit on the
//! structure-preserving flow at `t = 2^(k-1)`.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_part, identity, is_hermitian, smallest_singular, solve, zeros, CMatrix, MatrixJson,
    Tolerances,
};
use crate::pairs::{PairClass, SymplecticPair};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone)]
pub struct DareProblem {
    pub a: CMatrix,
    pub g: CMatrix,
    pub h: CMatrix,
}

#[derive(Debug, Clone)]
pub struct NmeProblem {
    pub a: CMatrix,
    pub q: CMatrix,
}

#[derive(Debug, Clone)]
pub struct CareProblem {
    pub a: CMatrix,
    pub g: CMatrix,
    pub h: CMatrix,
}

fn check_hermitian_data(pairs: &[(&str, &CMatrix)], n: usize, tol: &Tolerances) -> Result<()> {
    for (name, m) in pairs {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension(format!("{name} must be {n}x{n}")));
        }
        if !is_hermitian(m, tol)? {
            return Err(Error::Input(format!("{name} must be Hermitian")));
        }
    }
    Ok(())
}

impl DareProblem {
    pub fn new(a: CMatrix, g: CMatrix, h: CMatrix, tol: &Tolerances) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension("A must be square".into()));
        }
        check_hermitian_data(&[("G", &g), ("H", &h)], n, tol)?;
        Ok(DareProblem { a, g, h })
    }

    /// Relative residual of `X = A^H X (I + G X)^{-1} A + H` at `X`.
    pub fn residual(&self, x: &CMatrix) -> Result<f64> {
        let n = self.a.nrows();
        let inner = solve(&(identity(n) + &self.g * x), &self.a)?;
        let rhs = self.a.adjoint() * x * inner + &self.h;
        Ok((x - rhs).norm() / x.norm().max(1.0))
    }

    /// Residual of the dual equation `Y = A Y (I + H Y)^{-1} A^H + G` at `Y`.
    pub fn dual_residual(&self, y: &CMatrix) -> Result<f64> {
        let n = self.a.nrows();
        let ah: CMatrix = self.a.adjoint();
        let inner = solve(&(identity(n) + &self.h * y), &ah)?;
        let rhs = &self.a * y * inner + &self.g;
        Ok((y - rhs).norm() / y.norm().max(1.0))
    }
}

impl NmeProblem {
    pub fn new(a: CMatrix, q: CMatrix, tol: &Tolerances) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension("A must be square".into()));
        }
        check_hermitian_data(&[("Q", &q)], n, tol)?;
        Ok(NmeProblem { a, q })
    }

    /// Relative residual of `X + A^H X^{-1} A = Q` at `X`; `None` when `X`
    /// is too close to singular for the inverse to mean anything.
    pub fn residual(&self, x: &CMatrix) -> Option<f64> {
        if smallest_singular(x) <= 1e-13 * x.norm().max(1.0) {
            return None;
        }
        let xinv_a = solve(x, &self.a).ok()?;
        let lhs = x + self.a.adjoint() * xinv_a;
        Some((lhs - &self.q).norm() / self.q.norm().max(1.0))
    }
}

impl CareProblem {
    pub fn new(a: CMatrix, g: CMatrix, h: CMatrix, tol: &Tolerances) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension("A must be square".into()));
        }
        check_hermitian_data(&[("G", &g), ("H", &h)], n, tol)?;
        Ok(CareProblem { a, g, h })
    }

    /// Relative residual of `-X G X + A^H X + X A + H = 0` at `X`.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        let r = -(x * &self.g * x) + self.a.adjoint() * x + x * &self.a + &self.h;
        r.norm() / (x.norm() * x.norm()).max(1.0)
    }
}

fn breakdown_guard(m: &CMatrix, tol: &Tolerances) -> Result<()> {
    let sigma = smallest_singular(m);
    if sigma < tol.rank_tol * m.norm().max(1.0) {
        return Err(Error::Breakdown { sigma_min: sigma });
    }
    Ok(())
}

/// One SDA-1 step. `G`, `H` outputs are re-symmetrized to suppress drift.
pub fn sda1_step(
    a: &CMatrix,
    g: &CMatrix,
    h: &CMatrix,
    tol: &Tolerances,
) -> Result<(CMatrix, CMatrix, CMatrix)> {
    let n = a.nrows();
    let eye = identity(n);
    let igh = &eye + g * h;
    breakdown_guard(&igh, tol)?;
    let ihg = &eye + h * g;
    let ah: CMatrix = a.adjoint();
    let a_next = a * solve(&igh, a)?;
    let g_next = g + a * g * solve(&ihg, &ah)?;
    let h_next = h + a.adjoint() * solve(&ihg, &(h * a))?;
    Ok((a_next, hermitian_part(&g_next), hermitian_part(&h_next)))
}

/// One SDA-2 step. `Q`, `P` outputs are re-symmetrized to suppress drift.
pub fn sda2_step(
    a: &CMatrix,
    q: &CMatrix,
    p: &CMatrix,
    tol: &Tolerances,
) -> Result<(CMatrix, CMatrix, CMatrix)> {
    let qp = q - p;
    breakdown_guard(&qp, tol)?;
    let qp_inv_a = solve(&qp, a)?;
    let ah: CMatrix = a.adjoint();
    let a_next = a * &qp_inv_a;
    let q_next = q - a.adjoint() * &qp_inv_a;
    let p_next = p + a * solve(&qp, &ah)?;
    Ok((a_next, hermitian_part(&q_next), hermitian_part(&p_next)))
}

#[derive(Debug, Clone)]
pub enum SdaProblem {
    Dare(DareProblem),
    Nme(NmeProblem),
}

/// The `(A_k, second, third)` state of a run: `(A, G, H)` for SDA-1 and
/// `(A, Q, P)` for SDA-2.
#[derive(Debug, Clone)]
pub struct SdaRecord {
    pub k: usize,
    pub a: CMatrix,
    pub second: CMatrix,
    pub third: CMatrix,
    pub norm_a: f64,
    /// `|delta H_k| / |H_k|` (resp. `Q`); zero at the first record.
    pub step_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Converged,
    Breakdown { sigma_min: f64, at_k: usize },
    MaxIter,
}

#[derive(Debug, Clone)]
pub struct SdaTrace {
    pub records: Vec<SdaRecord>,
    pub verdict: Verdict,
    /// DARE: residual of `H_k` in the Riccati equation; NME: residual of
    /// `Q_k` in the matrix equation.
    pub solution_residual: Option<f64>,
    /// DARE: residual of `G_k` in the dual equation; NME: residual of `P_k`.
    pub dual_residual: Option<f64>,
}

impl SdaTrace {
    pub fn final_record(&self) -> &SdaRecord {
        self.records.last().expect("at least the initial record")
    }
}

/// Run SDA-1 or SDA-2 until `|A_k| <= tol`, the tracked iterate difference
/// falls below `tol`, a breakdown, or `kmax` records.
pub fn run_sda(problem: &SdaProblem, tol: f64, kmax: usize, tols: &Tolerances) -> Result<SdaTrace> {
    if kmax == 0 {
        return Err(Error::Input("kmax must be at least 1".into()));
    }
    let (mut a, mut second, mut third) = match problem {
        SdaProblem::Dare(p) => (p.a.clone(), p.g.clone(), p.h.clone()),
        SdaProblem::Nme(p) => {
            let n = p.a.nrows();
            (p.a.clone(), p.q.clone(), zeros(n, n))
        }
    };
    let mut records = vec![SdaRecord {
        k: 1,
        a: a.clone(),
        second: second.clone(),
        third: third.clone(),
        norm_a: a.norm(),
        step_change: 0.0,
    }];
    let mut verdict = Verdict::MaxIter;
    for k in 2..=kmax {
        let step = match problem {
            SdaProblem::Dare(_) => sda1_step(&a, &second, &third, tols),
            SdaProblem::Nme(_) => sda2_step(&a, &second, &third, tols),
        };
        let (a_next, second_next, third_next) = match step {
            Ok(v) => v,
            Err(Error::Breakdown { sigma_min }) => {
                verdict = Verdict::Breakdown { sigma_min, at_k: k };
                break;
            }
            Err(e) => return Err(e),
        };
        // the convergence-bearing iterate is H_k for DARE and Q_k for NME
        let step_change = match problem {
            SdaProblem::Dare(_) => (&third_next - &third).norm() / third.norm().max(1.0),
            SdaProblem::Nme(_) => (&second_next - &second).norm() / second.norm().max(1.0),
        };
        a = a_next;
        second = second_next;
        third = third_next;
        records.push(SdaRecord {
            k,
            a: a.clone(),
            second: second.clone(),
            third: third.clone(),
            norm_a: a.norm(),
            step_change,
        });
        if a.norm() <= tol || step_change <= tol {
            verdict = Verdict::Converged;
            break;
        }
    }
    let (solution_residual, dual_residual) = match problem {
        SdaProblem::Dare(p) => {
            let last = records.last().unwrap();
            (
                p.residual(&last.third).ok(),
                p.dual_residual(&last.second).ok(),
            )
        }
        SdaProblem::Nme(p) => {
            let last = records.last().unwrap();
            (p.residual(&last.second), p.residual(&last.third))
        }
    };
    Ok(SdaTrace {
        records,
        verdict,
        solution_residual,
        dual_residual,
    })
}

/// Cayley transformation taking a CARE to a DARE with the same stabilizing
/// solution. The stable half plane maps into the unit disc through
/// `mu = (lambda + gamma) / (lambda - gamma)`, so the transform is built on
/// `A - gamma I`:
///
/// ```text
/// W    = (A - gI) + G (A^H - gI)^{-1} H
/// Ahat = W^{-1} [(A + gI) + G (A^H - gI)^{-1} H]
/// Ghat = 2g W^{-1} G (A^H - gI)^{-1}
/// Hhat = 2g W^{-H} H (A - gI)^{-1}
/// ```
pub fn cayley(care: &CareProblem, gamma: f64) -> Result<DareProblem> {
    if gamma <= 0.0 {
        return Err(Error::Input("gamma must be positive".into()));
    }
    let n = care.a.nrows();
    let eye = identity(n);
    let a_minus = &care.a - eye.scale(gamma);
    let a_plus = &care.a + eye.scale(gamma);
    let floor = 1e-12 * care.a.norm().max(1.0);
    if smallest_singular(&a_minus) <= floor {
        return Err(Error::Singularity(
            "A - gamma I (gamma hits the spectrum)".into(),
        ));
    }
    let a_minus_h: CMatrix = a_minus.adjoint();
    let ah_minus_inv_h = solve(&a_minus_h, &care.h)?;
    let w1 = &a_minus + &care.g * &ah_minus_inv_h;
    if smallest_singular(&w1) <= floor {
        return Err(Error::Singularity("Cayley block transform".into()));
    }
    let a_hat = solve(&w1, &(&a_plus + &care.g * &ah_minus_inv_h))?;
    let g_hat = solve(&w1, &(&care.g * solve(&a_minus_h, &eye)?))?.scale(2.0 * gamma);
    let w2: CMatrix = w1.adjoint();
    let h_hat = solve(&w2, &(&care.h * solve(&a_minus, &eye)?))?.scale(2.0 * gamma);
    DareProblem::new(
        a_hat,
        hermitian_part(&g_hat),
        hermitian_part(&h_hat),
        &Tolerances::default(),
    )
}

/// Assemble the symplectic pair of an SDA state:
/// `([[A, 0], [-H, I]], [[I, G], [0, A^H]])` for DARE states in the `(I, I)`
/// class, `([[A, 0], [Q, -I]], [[-P, I], [A^H, 0]])` for NME states in the
/// `class_s2` preset.
pub fn iterate_pair(
    record: &SdaRecord,
    problem: &SdaProblem,
    class: &PairClass,
) -> Result<SymplecticPair> {
    let n = record.a.nrows();
    let mut m = zeros(2 * n, 2 * n);
    let mut l = zeros(2 * n, 2 * n);
    match problem {
        SdaProblem::Dare(_) => {
            if !class.is_s1_preset() {
                return Err(Error::Usage("DARE iterates live in the (I, I) class".into()));
            }
            m.view_mut((0, 0), (n, n)).copy_from(&record.a);
            m.view_mut((n, 0), (n, n)).copy_from(&(-&record.third));
            m.view_mut((n, n), (n, n)).copy_from(&identity(n));
            l.view_mut((0, 0), (n, n)).copy_from(&identity(n));
            l.view_mut((0, n), (n, n)).copy_from(&record.second);
            l.view_mut((n, n), (n, n)).copy_from(&record.a.adjoint());
        }
        SdaProblem::Nme(_) => {
            if !class.is_s2_preset() {
                return Err(Error::Usage("NME iterates live in the (J, -I) class".into()));
            }
            m.view_mut((0, 0), (n, n)).copy_from(&record.a);
            m.view_mut((n, 0), (n, n)).copy_from(&record.second);
            m.view_mut((n, n), (n, n)).copy_from(&(-identity(n)));
            l.view_mut((0, 0), (n, n)).copy_from(&(-&record.third));
            l.view_mut((0, n), (n, n)).copy_from(&identity(n));
            l.view_mut((n, 0), (n, n)).copy_from(&record.a.adjoint());
        }
    }
    SymplecticPair::new(m, l, &Tolerances::default())
}

/// JSON problem file: `{"type": "dare"|"nme"|"care", "A": ..., ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProblemJson {
    Dare {
        #[serde(rename = "A")]
        a: MatrixJson,
        #[serde(rename = "G")]
        g: MatrixJson,
        #[serde(rename = "H")]
        h: MatrixJson,
    },
    Nme {
        #[serde(rename = "A")]
        a: MatrixJson,
        #[serde(rename = "Q")]
        q: MatrixJson,
    },
    Care {
        #[serde(rename = "A")]
        a: MatrixJson,
        #[serde(rename = "G")]
        g: MatrixJson,
        #[serde(rename = "H")]
        h: MatrixJson,
        gamma: Option<f64>,
    },
}

impl ProblemJson {
    /// Resolve to a runnable SDA problem; CAREs are passed through the
    /// Cayley transform with their `gamma` (default 1).
    pub fn into_problem(self, tol: &Tolerances) -> Result<SdaProblem> {
        match self {
            ProblemJson::Dare { a, g, h } => Ok(SdaProblem::Dare(DareProblem::new(
                a.to_matrix()?,
                g.to_matrix()?,
                h.to_matrix()?,
                tol,
            )?)),
            ProblemJson::Nme { a, q } => Ok(SdaProblem::Nme(NmeProblem::new(
                a.to_matrix()?,
                q.to_matrix()?,
                tol,
            )?)),
            ProblemJson::Care { a, g, h, gamma } => {
                let care = CareProblem::new(a.to_matrix()?, g.to_matrix()?, h.to_matrix()?, tol)?;
                Ok(SdaProblem::Dare(cayley(&care, gamma.unwrap_or(1.0))?))
            }
        }
    }
}
