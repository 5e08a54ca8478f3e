//! The structure-preserving flow through a pair class.
//!
//! Radon's lemma turns the Riccati differential equation
//! `W' = [-W, I] H [I; W]` into the linear propagation
//! `[Q; P](t) = e^{Ht} [I; W0]` with `W(t) = P(t) Q(t)^{-1}`, extended
//! through the isolated times where `Q(t)` is singular (blow-ups of `W`).
//! The four blocks of the flow `X(t)` are recovered from two such
//! propagations: the `X22`/`X12` pair runs backwards under the conjugated
//! generator `S2 H S2^{-1}`, the `X11`/`X21` pair forwards under the star
//! generator `J^{-1} S1 H S1^{-1} J`. At `t = 2^(k-1)` the flow passes
//! through the doubling-algorithm iterates.

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, identity, make_j, mat_exp, smallest_singular, solve_right, zeros, CMatrix,
    Tolerances,
};
use crate::pairs::{
    block_diag, build_generator, classify, eigen_split, j_block, symplectic_inverse, to_pair,
    EigenSplit, FlowGenerator, HermitianBlock, IndexAtInfinity, PairClass, SymplecticPair,
};
use crate::sda::{sda1_step, sda2_step};

/// Absolute time accuracy of refined singular times.
pub const REFINE_TOL: f64 = 1e-8;

/// A flow problem: the class, the initial block, the generator of the pair
/// at `t = 1`, and the two conjugated generators driving the block flows.
#[derive(Debug, Clone)]
pub struct FlowProblem {
    pub class: PairClass,
    pub x1: HermitianBlock,
    pub gen: FlowGenerator,
    pub split: EigenSplit,
    /// `S2 H S2^{-1}`, the generator of the backward `X22`/`X12` flow.
    pub h_s2: CMatrix,
    /// `-diag(I, -I) S2 H S2^{-1} diag(I, -I)`.
    pub htilde: CMatrix,
    /// `J^{-1} S1 H S1^{-1} J`, the generator of the `X11`/`X21` flow.
    pub hstar: CMatrix,
}

fn sign_flip(n: usize) -> CMatrix {
    let mut s = identity(2 * n);
    for i in n..2 * n {
        s[(i, i)] = -s[(i, i)];
    }
    s
}

/// Build the flow problem for a class and an initial Hermitian block.
pub fn build_flow_problem(
    class: &PairClass,
    x1: &HermitianBlock,
    tol: &Tolerances,
) -> Result<FlowProblem> {
    let n = class.half_dim();
    let pair = to_pair(x1, class)?;
    let cls = classify(&pair, tol)?;
    if !cls.regular {
        return Err(Error::NotRegular);
    }
    if cls.ind_inf == IndexAtInfinity::TooHigh {
        return Err(Error::IndexTooHigh);
    }
    let split = eigen_split(&pair, tol)?;
    let gen = build_generator(&pair, &split)?;
    let s2_inv = symplectic_inverse(&class.s2)?;
    let h_s2 = &class.s2 * &gen.h * s2_inv;
    let sigma = sign_flip(n);
    let htilde = -(&sigma * &h_s2 * &sigma);
    let j = make_j(n)?;
    let s1_inv = symplectic_inverse(&class.s1)?;
    let hstar = -(&j * &class.s1 * &gen.h * s1_inv * &j);
    Ok(FlowProblem {
        class: class.clone(),
        x1: x1.clone(),
        gen,
        split,
        h_s2,
        htilde,
        hstar,
    })
}

impl FlowProblem {
    pub fn half_dim(&self) -> usize {
        self.class.half_dim()
    }

    /// The `Q` factor whose singularity marks a blow-up of `X22(t)`,
    /// `X12(t)` at flow time `t`.
    pub fn q_factor(&self, t: f64) -> Result<CMatrix> {
        let (q, _) = propagate(&self.h_s2, &(-&self.x1.x22), -t + 1.0)?;
        Ok(q)
    }

    /// The `Q` factor of the star flow driving `X11(t)`, `X21(t)`.
    pub fn qstar_factor(&self, t: f64) -> Result<CMatrix> {
        let (q, _) = propagate(&self.hstar, &self.x1.x11, t - 1.0)?;
        Ok(q)
    }
}

/// `[Q; P] = e^{Ht} [I; W0]`.
pub fn propagate(h: &CMatrix, w0: &CMatrix, t: f64) -> Result<(CMatrix, CMatrix)> {
    let n2 = h.nrows();
    let n = n2 / 2;
    if h.ncols() != n2 || n2 % 2 != 0 {
        return Err(Error::Dimension("propagate needs a 2n x 2n generator".into()));
    }
    if w0.nrows() != n || w0.ncols() != n {
        return Err(Error::Dimension("initial value must be n x n".into()));
    }
    let e = mat_exp(&h.scale(t))?;
    let mut y0 = zeros(n2, n);
    y0.view_mut((0, 0), (n, n)).copy_from(&identity(n));
    y0.view_mut((n, 0), (n, n)).copy_from(w0);
    let y = e * y0;
    Ok((
        y.view((0, 0), (n, n)).into(),
        y.view((n, 0), (n, n)).into(),
    ))
}

/// Extended Riccati solution `W(t) = P(t) Q(t)^{-1}`, `None` at a blow-up.
pub fn rde_solve(
    h: &CMatrix,
    w0: &CMatrix,
    t: f64,
    tol: &Tolerances,
) -> Result<Option<CMatrix>> {
    let (q, p) = propagate(h, w0, t)?;
    if smallest_singular(&q) <= tol.rank_tol * q.norm().max(1.0) {
        return Ok(None);
    }
    Ok(Some(solve_right(&q, &p)?))
}

#[derive(Debug, Clone)]
pub struct SingularTime {
    pub t: f64,
    pub sigma_min: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Default)]
pub struct SingularTimeList {
    pub times: Vec<SingularTime>,
    /// Cells whose dip could not be refined to a clean zero, most often a
    /// grid too coarse to separate neighboring zeros.
    pub warnings: Vec<String>,
}

impl SingularTimeList {
    pub fn time_values(&self) -> Vec<f64> {
        self.times.iter().map(|s| s.t).collect()
    }
}

/// Golden-section minimization of `f` on `[a, b]` down to `REFINE_TOL`.
fn golden_min(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > REFINE_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    Ok((mid, f(mid)?))
}

/// Scan a nonnegative function on a uniform grid, bracket the local minima
/// that dip below `0.5 x median`, and refine each by golden-section search.
/// Refined minima are accepted as singular times when they fall below
/// `accept_frac x median`.
pub fn scan_singular_times(
    eval: &impl Fn(f64) -> Result<f64>,
    t_range: (f64, f64),
    grid: usize,
    accept_frac: f64,
) -> Result<SingularTimeList> {
    let (t0, t1) = t_range;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::Input("time range must be finite and increasing".into()));
    }
    if grid < 2 {
        return Err(Error::Input("grid must have at least 2 points".into()));
    }
    let dt = (t1 - t0) / (grid - 1) as f64;
    let ts: Vec<f64> = (0..grid).map(|i| t0 + dt * i as f64).collect();
    let sigmas: Vec<f64> = ts.iter().map(|&t| eval(t)).collect::<Result<_>>()?;
    let mut sorted = sigmas.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2].max(f64::MIN_POSITIVE);
    let dip = 0.5 * median;
    let accept = accept_frac * median;

    let mut out = SingularTimeList::default();
    for i in 0..grid {
        let left = if i > 0 { sigmas[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < grid { sigmas[i + 1] } else { f64::INFINITY };
        if sigmas[i] > dip || sigmas[i] > left || sigmas[i] > right {
            continue;
        }
        // interior plateaus: only take the leftmost sample
        if i > 0 && sigmas[i] == left {
            continue;
        }
        let a = if i > 0 { ts[i - 1] } else { ts[i] };
        let b = if i + 1 < grid { ts[i + 1] } else { ts[i] };
        let (t_min, s_min) = golden_min(eval, a, b)?;
        if s_min <= accept {
            out.times.push(SingularTime {
                t: t_min,
                sigma_min: s_min,
                bracket: (a, b),
            });
        } else {
            out.warnings.push(format!(
                "dip near t = {t_min:.6} refined to sigma = {s_min:.3e} above the acceptance \
                 threshold {accept:.3e}; the cell [{a:.6}, {b:.6}] may hold unseparated zeros"
            ));
        }
    }
    out.times.sort_by(|x, y| x.t.partial_cmp(&y.t).unwrap());
    out.times.dedup_by(|a, b| (a.t - b.t).abs() <= 10.0 * REFINE_TOL);
    Ok(out)
}

/// Blow-up times of the Riccati flow of `(H, W0)` on a grid-scanned range.
pub fn singular_times(
    h: &CMatrix,
    w0: &CMatrix,
    t_range: (f64, f64),
    grid: usize,
) -> Result<SingularTimeList> {
    let eval = |t: f64| -> Result<f64> {
        let (q, _) = propagate(h, w0, t)?;
        Ok(smallest_singular(&q))
    };
    scan_singular_times(&eval, t_range, grid, 1e-5)
}

/// One sample of the extended flow.
#[derive(Debug, Clone)]
pub struct FlowSample {
    pub t: f64,
    /// backward-flow factors driving `X22`, `X12`
    pub q: CMatrix,
    pub p: CMatrix,
    /// star-flow factors driving `X11`, `X21`
    pub qstar: CMatrix,
    pub pstar: CMatrix,
    /// `None` marks a blow-up
    pub x: Option<HermitianBlock>,
    pub sigma_min_q: f64,
}

/// The extended solution `X(t)`; blow-ups are reported in-band.
pub fn extended_x(problem: &FlowProblem, t: f64, tol: &Tolerances) -> Result<FlowSample> {
    let (q, p) = propagate(&problem.h_s2, &(-&problem.x1.x22), -t + 1.0)?;
    let (qstar, pstar) = propagate(&problem.hstar, &problem.x1.x11, t - 1.0)?;
    let sq = smallest_singular(&q);
    let sqs = smallest_singular(&qstar);
    let blowup = sq <= tol.rank_tol * q.norm().max(1.0)
        || sqs <= tol.rank_tol * qstar.norm().max(1.0);
    let x = if blowup {
        None
    } else {
        let x22 = -solve_right(&q, &p)?;
        let x12 = solve_right(&q, &problem.x1.x12)?;
        let x11 = solve_right(&qstar, &pstar)?;
        let x21 = solve_right(&qstar, &problem.x1.x21)?;
        Some(HermitianBlock::raw(x11, x12, x21, x22))
    };
    Ok(FlowSample {
        t,
        q,
        p,
        qstar,
        pstar,
        x,
        sigma_min_q: sq,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FlowResiduals {
    /// `|M(t) U0|` over the pair scale
    pub m_u0: f64,
    /// `|L(t) Uinf|` over the pair scale
    pub l_uinf: f64,
    /// `|M(t) U1 - L(t) U1 e^{Hhat t}|` over the pair scale
    pub deflating: f64,
}

impl FlowResiduals {
    pub fn max(&self) -> f64 {
        self.m_u0.max(self.l_uinf).max(self.deflating)
    }
}

/// The pair `(M(t), L(t)) = T(X(t))` together with its invariant-subspace
/// residuals.
pub fn flow_pair(
    problem: &FlowProblem,
    t: f64,
    tol: &Tolerances,
) -> Result<(SymplecticPair, FlowResiduals)> {
    let sample = extended_x(problem, t, tol)?;
    let Some(x) = sample.x else {
        return Err(Error::NoSolution { t });
    };
    let pair = to_pair(&x, &problem.class)?;
    let scale = pair.m.norm() + pair.l.norm();
    let exp_hhat_t = mat_exp(&problem.gen.hhat.scale(t))?;
    let deflating = (&pair.m * &problem.split.u1
        - &pair.l * &problem.split.u1 * exp_hhat_t)
        .norm()
        / scale.max(1.0);
    let m_u0 = (&pair.m * &problem.split.u0).norm() / scale.max(1.0);
    let l_uinf = (&pair.l * &problem.split.uinf).norm() / scale.max(1.0);
    Ok((pair, FlowResiduals { m_u0, l_uinf, deflating }))
}

/// Solve the defining linear system of the flow directly at time `t`, as an
/// independent route to `X(t)`: with `V1 = S1 U`, `V2 = S2 U` split into
/// `n`-row halves, `X(t)` satisfies
///
/// ```text
/// X(t) [-V2_top (e^{Hhat t} (+) E22); V1_bot (I (+) E11)]
///      = [V1_top (e^{Hhat t} (+) E22); -V2_bot (I (+) E11)].
/// ```
pub fn crosscheck_linear_system(
    problem: &FlowProblem,
    t: f64,
    tol: &Tolerances,
) -> Result<HermitianBlock> {
    let n = problem.half_dim();
    let (nhat, ell) = (problem.split.nhat, problem.split.ell);
    let u = problem.split.stacked();
    let v1 = &problem.class.s1 * &u;
    let v2 = &problem.class.s2 * &u;
    let v1_top = CMatrix::from(v1.view((0, 0), (n, 2 * n)));
    let v1_bot = CMatrix::from(v1.view((n, 0), (n, 2 * n)));
    let v2_top = CMatrix::from(v2.view((0, 0), (n, 2 * n)));
    let v2_bot = CMatrix::from(v2.view((n, 0), (n, 2 * n)));

    let exp_hhat_t = mat_exp(&problem.gen.hhat.scale(t))?;
    let mut e11 = zeros(2 * ell, 2 * ell);
    e11.view_mut((0, 0), (ell, ell)).copy_from(&identity(ell));
    let mut e22 = zeros(2 * ell, 2 * ell);
    e22.view_mut((ell, ell), (ell, ell)).copy_from(&identity(ell));
    let right = block_diag(&[&exp_hhat_t, &e22]);
    let left = block_diag(&[&identity(2 * nhat), &e11]);

    let mut coeff = zeros(2 * n, 2 * n);
    coeff
        .view_mut((0, 0), (n, 2 * n))
        .copy_from(&(-(&v2_top * &right)));
    coeff
        .view_mut((n, 0), (n, 2 * n))
        .copy_from(&(&v1_bot * &left));
    let mut rhs = zeros(2 * n, 2 * n);
    rhs.view_mut((0, 0), (n, 2 * n)).copy_from(&(&v1_top * &right));
    rhs.view_mut((n, 0), (n, 2 * n))
        .copy_from(&(-(&v2_bot * &left)));

    if smallest_singular(&coeff) <= tol.rank_tol * coeff.norm().max(1.0) {
        return Err(Error::NoSolution { t });
    }
    let x = solve_right(&coeff, &rhs)?;
    Ok(HermitianBlock::raw(
        x.view((0, 0), (n, n)).into(),
        x.view((0, n), (n, n)).into(),
        x.view((n, 0), (n, n)).into(),
        x.view((n, n), (n, n)).into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoublingStatus {
    Ok,
    BlowUp,
    Breakdown,
}

#[derive(Debug, Clone)]
pub struct DoublingRow {
    pub k: usize,
    pub t: f64,
    pub diff_x11: f64,
    pub diff_x12: f64,
    pub diff_x21: f64,
    pub diff_x22: f64,
    pub status: DoublingStatus,
}

impl DoublingRow {
    pub fn max_diff(&self) -> f64 {
        self.diff_x11
            .max(self.diff_x12)
            .max(self.diff_x21)
            .max(self.diff_x22)
    }
}

/// Compare the doubling iterates with the flow sampled at `t = 2^(k-1)`:
/// SDA-1 states map to blocks through `X = [[G, A], [A^H, -H]]`, SDA-2
/// states through `X = [[P, -A], [-A^H, -Q]]`.
pub fn sample_doubling(
    problem: &FlowProblem,
    kmax: usize,
    tol: &Tolerances,
) -> Result<Vec<DoublingRow>> {
    let is_s1 = problem.class.is_s1_preset();
    let is_s2 = problem.class.is_s2_preset();
    if !is_s1 && !is_s2 {
        return Err(Error::Usage(
            "doubling comparison needs one of the preset classes".into(),
        ));
    }
    let x1 = &problem.x1;
    // SDA state at k = 1 read from the block dictionary
    let (mut a, mut second, mut third) = if is_s1 {
        (x1.x12.clone(), x1.x11.clone(), -&x1.x22)
    } else {
        (-&x1.x12, -&x1.x22, x1.x11.clone())
    };
    let mut rows = Vec::new();
    let mut broken = false;
    for k in 1..=kmax {
        let t = 2f64.powi(k as i32 - 1);
        if k > 1 && !broken {
            let step = if is_s1 {
                sda1_step(&a, &second, &third, tol)
            } else {
                sda2_step(&a, &second, &third, tol)
            };
            match step {
                Ok(next) => (a, second, third) = next,
                Err(Error::Breakdown { .. }) => broken = true,
                Err(e) => return Err(e),
            }
        }
        if broken {
            rows.push(DoublingRow {
                k,
                t,
                diff_x11: f64::NAN,
                diff_x12: f64::NAN,
                diff_x21: f64::NAN,
                diff_x22: f64::NAN,
                status: DoublingStatus::Breakdown,
            });
            continue;
        }
        let sample = extended_x(problem, t, tol)?;
        let Some(x) = sample.x else {
            rows.push(DoublingRow {
                k,
                t,
                diff_x11: f64::NAN,
                diff_x12: f64::NAN,
                diff_x21: f64::NAN,
                diff_x22: f64::NAN,
                status: DoublingStatus::BlowUp,
            });
            continue;
        };
        let (x11_k, x12_k, x21_k, x22_k) = if is_s1 {
            (second.clone(), a.clone(), a.adjoint(), -&third)
        } else {
            (third.clone(), -&a, -a.adjoint(), -&second)
        };
        let rel = |got: &CMatrix, want: &CMatrix| (got - want).norm() / want.norm().max(1.0);
        rows.push(DoublingRow {
            k,
            t,
            diff_x11: rel(&x.x11, &x11_k),
            diff_x12: rel(&x.x12, &x12_k),
            diff_x21: rel(&x.x21, &x21_k),
            diff_x22: rel(&x.x22, &x22_k),
            status: DoublingStatus::Ok,
        });
    }
    Ok(rows)
}

/// Spectra of the two conjugated generators agree after negation; exposed
/// for diagnostics.
pub fn generator_spectra_mirror(problem: &FlowProblem) -> Result<f64> {
    let mut a = eigenvalues(&problem.hstar)?;
    let mut b = eigenvalues(&problem.htilde)?
        .iter()
        .map(|l| -l)
        .collect::<Vec<_>>();
    let key = |x: &num_complex::Complex64| (x.re, x.im);
    a.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    b.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    let scale = a.iter().map(|x| x.norm()).fold(1.0f64, f64::max);
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_hamiltonian, random_instance, re, RandomKind, ONE};
    use crate::oracles;
    use crate::pairs::{dare_state_to_block, nme_state_to_block};
    use num_complex::Complex64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn parabolic_h() -> CMatrix {
        let mut h = zeros(2, 2);
        h[(0, 1)] = ONE;
        h
    }

    fn scalar(x: f64) -> CMatrix {
        CMatrix::from_element(1, 1, re(x))
    }

    fn random_ind0_problem(n: usize, seed: u64) -> FlowProblem {
        // an invertible-in-class DARE instance: A invertible generic
        let a = oracles::random_contraction(n, seed) + identity(n).scale(1.1);
        let g = random_instance(RandomKind::Hermitian, n, seed + 1).scale(0.4);
        let h = random_instance(RandomKind::Hermitian, n, seed + 2).scale(0.4);
        let x1 = dare_state_to_block(&a, &g, &h).unwrap();
        build_flow_problem(&PairClass::class_s1(n), &x1, &tol()).unwrap()
    }

    fn nme_flow_problem(n: usize, seed: u64) -> FlowProblem {
        let a = oracles::random_contraction(n, seed);
        let q = random_instance(RandomKind::Hermitian, n, seed + 1).scale(0.5)
            + identity(n).scale(4.0);
        let x1 = nme_state_to_block(&a, &q, &zeros(n, n)).unwrap();
        build_flow_problem(&PairClass::class_s2(n), &x1, &tol()).unwrap()
    }

    #[test]
    fn propagate_zero_generator() {
        let h = zeros(4, 4);
        let w0 = random_instance(RandomKind::Hermitian, 2, 1);
        for t in [0.0, 1.5, -3.0] {
            let (q, p) = propagate(&h, &w0, t).unwrap();
            assert!((q - identity(2)).norm() < 1e-15);
            assert!((p - &w0).norm() < 1e-15);
        }
    }

    #[test]
    fn propagate_parabolic() {
        // Q(t) = 1 + w0 t, P(t) = w0 for the shear generator
        let h = parabolic_h();
        let (q, p) = propagate(&h, &scalar(-1.0), 0.25).unwrap();
        assert!((q[(0, 0)] - re(0.75)).norm() < 1e-14);
        assert!((p[(0, 0)] + ONE).norm() < 1e-14);
    }

    #[test]
    fn propagate_semigroup() {
        let h = random_instance(RandomKind::Hamiltonian, 2, 9);
        let w0 = random_instance(RandomKind::Hermitian, 2, 10);
        let (t, s) = (0.6, -1.1);
        let (q1, p1) = propagate(&h, &w0, t + s).unwrap();
        // restart from the t-state
        let e_s = mat_exp(&h.scale(s)).unwrap();
        let (qt, pt) = propagate(&h, &w0, t).unwrap();
        let mut y = zeros(4, 2);
        y.view_mut((0, 0), (2, 2)).copy_from(&qt);
        y.view_mut((2, 0), (2, 2)).copy_from(&pt);
        let y2 = e_s * y;
        assert!((y2.view((0, 0), (2, 2)).clone_owned() - q1).norm() < 1e-10);
        assert!((y2.view((2, 0), (2, 2)).clone_owned() - p1).norm() < 1e-10);
    }

    #[test]
    fn rde_scalar_closed_form_and_blowup() {
        let h = parabolic_h();
        let w0 = scalar(-1.0);
        let w = rde_solve(&h, &w0, 0.5, &tol()).unwrap().unwrap();
        assert!((w[(0, 0)] - re(-2.0)).norm() < 1e-12);
        assert!(rde_solve(&h, &w0, 1.0, &tol()).unwrap().is_none());
        for t in [-1.5, 0.3, 0.9, 2.0] {
            let got = rde_solve(&h, &w0, t, &tol()).unwrap().unwrap()[(0, 0)].re;
            let want = oracles::scalar_parabolic_rde(-1.0, t).unwrap();
            assert!((got - want).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn rde_constant_for_zero_generator() {
        let w0 = random_instance(RandomKind::Hermitian, 2, 2);
        let w = rde_solve(&zeros(4, 4), &w0, 2.2, &tol()).unwrap().unwrap();
        assert!((w - w0).norm() < 1e-14);
    }

    #[test]
    fn rde_finite_difference_matches_bracket_form() {
        // W' = [-W, I] H [I; W] checked by a central difference
        let h = random_instance(RandomKind::Hamiltonian, 3, 21);
        let w0 = random_instance(RandomKind::Hermitian, 3, 22);
        let t = 0.3;
        let hcap = 1e-4;
        let wdot = oracles::central_difference(
            |s| {
                rde_solve(&h, &w0, s, &tol())?
                    .ok_or_else(|| Error::NoSolution { t: s })
            },
            t,
            hcap,
        )
        .unwrap();
        let w = rde_solve(&h, &w0, t, &tol()).unwrap().unwrap();
        let n = 3;
        let mut bracket_left = zeros(n, 2 * n);
        bracket_left.view_mut((0, 0), (n, n)).copy_from(&(-&w));
        bracket_left.view_mut((0, n), (n, n)).copy_from(&identity(n));
        let mut stacked = zeros(2 * n, n);
        stacked.view_mut((0, 0), (n, n)).copy_from(&identity(n));
        stacked.view_mut((n, 0), (n, n)).copy_from(&w);
        let rhs = bracket_left * &h * stacked;
        assert!((wdot - &rhs).norm() / rhs.norm().max(1.0) < 1e-6);
    }

    #[test]
    fn singular_times_scalar_blowup() {
        let list = singular_times(&parabolic_h(), &scalar(-1.0), (-2.0, 2.0), 401).unwrap();
        assert_eq!(list.times.len(), 1, "warnings: {:?}", list.warnings);
        assert!((list.times[0].t - 1.0).abs() < 1e-8);
    }

    #[test]
    fn singular_times_none_for_zero_generator() {
        let w0 = random_instance(RandomKind::Hermitian, 2, 3);
        let list = singular_times(&zeros(4, 4), &w0, (-2.0, 2.0), 101).unwrap();
        assert!(list.times.is_empty());
        assert!(list.warnings.is_empty());
    }

    #[test]
    fn flow_problem_generators_are_hamiltonian_and_mirrored() {
        let problem = nme_flow_problem(3, 70);
        assert!(is_hamiltonian(&problem.htilde, &tol()).unwrap());
        assert!(is_hamiltonian(&problem.hstar, &tol()).unwrap());
        assert!(generator_spectra_mirror(&problem).unwrap() < 1e-9);
    }

    #[test]
    fn flow_problem_htilde_scalar_example() {
        // class (I, I) with the shear Hamiltonian: Htilde keeps the shape
        // [[0, s], [0, 0]] with the same off-diagonal entry
        let a = scalar(1.2);
        let g = scalar(0.0);
        let h = scalar(0.0);
        let x1 = dare_state_to_block(&a, &g, &h).unwrap();
        let problem = build_flow_problem(&PairClass::class_s1(1), &x1, &tol()).unwrap();
        // H = log of the pair generator; Htilde = -sigma H sigma flips the
        // off-diagonal signs twice on the diagonal blocks
        let ht = &problem.htilde;
        assert!(is_hamiltonian(ht, &tol()).unwrap());
        let flip = sign_flip(1);
        let expect = -(&flip * &problem.h_s2 * &flip);
        assert!((ht - expect).norm() < 1e-14);
    }

    #[test]
    fn extended_x_at_one_is_initial() {
        for problem in [random_ind0_problem(2, 80), nme_flow_problem(2, 81)] {
            let sample = extended_x(&problem, 1.0, &tol()).unwrap();
            let x = sample.x.unwrap();
            assert!((x.assemble() - problem.x1.assemble()).norm() < 1e-9);
        }
    }

    #[test]
    fn extended_x_blocks_stay_hermitian() {
        let problem = nme_flow_problem(3, 90);
        for i in 0..20 {
            let t = -2.0 + 0.21 * i as f64;
            let sample = extended_x(&problem, t, &tol()).unwrap();
            if let Some(x) = sample.x {
                let scale = x.assemble().norm().max(1.0);
                assert!((&x.x11 - x.x11.adjoint()).norm() < 1e-9 * scale, "t = {t}");
                assert!((&x.x22 - x.x22.adjoint()).norm() < 1e-9 * scale, "t = {t}");
                assert!((&x.x21 - x.x12.adjoint()).norm() < 1e-9 * scale, "t = {t}");
            }
        }
    }

    #[test]
    fn flow_pair_residuals_small() {
        let problem = random_ind0_problem(2, 100);
        let (pair1, res1) = flow_pair(&problem, 1.0, &tol()).unwrap();
        assert!(res1.max() < 1e-8);
        let scale = pair1.m.norm() + pair1.l.norm();
        assert!(scale > 0.0);
        let (_, res) = flow_pair(&problem, 0.7, &tol()).unwrap();
        assert!(res.max() < 1e-7, "residuals {res:?}");
        // pair property along the flow
        let j = make_j(2).unwrap();
        for t in [0.3, 1.7, 2.4] {
            let (pair, _) = flow_pair(&problem, t, &tol()).unwrap();
            let resid =
                (&pair.m * &j * pair.m.adjoint() - &pair.l * &j * pair.l.adjoint()).norm();
            assert!(resid < 1e-8 * (pair.m.norm_squared() + pair.l.norm_squared()).max(1.0));
        }
    }

    #[test]
    fn crosscheck_agrees_with_extended_x() {
        for problem in [random_ind0_problem(2, 110), nme_flow_problem(3, 111)] {
            for t in [1.0, 0.7, 1.9] {
                let direct = crosscheck_linear_system(&problem, t, &tol()).unwrap();
                let sample = extended_x(&problem, t, &tol()).unwrap();
                let x = sample.x.expect("no blow-up here");
                let scale = x.assemble().norm().max(1.0);
                assert!(
                    (direct.assemble() - x.assemble()).norm() < 1e-7 * scale,
                    "t = {t}"
                );
            }
        }
    }

    #[test]
    fn crosscheck_at_initial_time_returns_x1() {
        let problem = nme_flow_problem(2, 115);
        let direct = crosscheck_linear_system(&problem, 1.0, &tol()).unwrap();
        assert!((direct.assemble() - problem.x1.assemble()).norm() < 1e-9);
    }

    #[test]
    fn crosscheck_no_solution_at_blowup() {
        // scalar DARE-class problem engineered to blow up: A = 2 makes the
        // flow leave the class at finite t (Q factor crosses zero)
        let x1 = dare_state_to_block(&scalar(2.0), &scalar(1.0), &scalar(1.0)).unwrap();
        let problem = build_flow_problem(&PairClass::class_s1(1), &x1, &tol()).unwrap();
        let list = scan_singular_times(
            &|t| Ok(smallest_singular(&problem.q_factor(t)?)),
            (0.0, 4.0),
            801,
            1e-5,
        )
        .unwrap();
        assert!(!list.times.is_empty(), "expected a blow-up in [0, 4]");
        let t_hat = list.times[0].t;
        match crosscheck_linear_system(&problem, t_hat, &tol()) {
            Err(Error::NoSolution { .. }) => {}
            Ok(x) => {
                // at the singular time the coefficient matrix may be just
                // above the rank floor; the solution then carries a huge norm
                assert!(x.assemble().norm() > 1e6);
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn doubling_identity_matches_sda() {
        let problem = nme_flow_problem(4, 120);
        let rows = sample_doubling(&problem, 5, &tol()).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows[0].max_diff() < 1e-12, "k = 1 shares the initial state");
        for row in &rows {
            assert_eq!(row.status, DoublingStatus::Ok);
            assert!(row.max_diff() < 1e-7, "k = {}: {:?}", row.k, row);
        }
    }

    #[test]
    fn doubling_identity_dare_side() {
        let n = 3;
        let a = oracles::random_contraction(n, 130);
        let g = random_instance(RandomKind::Hermitian, n, 131).scale(0.3);
        let h = random_instance(RandomKind::Hermitian, n, 132).scale(0.3);
        let x1 = dare_state_to_block(&a, &g, &h).unwrap();
        let problem = build_flow_problem(&PairClass::class_s1(n), &x1, &tol()).unwrap();
        let rows = sample_doubling(&problem, 5, &tol()).unwrap();
        for row in &rows {
            assert_eq!(row.status, DoublingStatus::Ok);
            assert!(row.max_diff() < 1e-7, "k = {}: {:?}", row.k, row);
        }
    }

    #[test]
    fn q_and_qstar_singular_simultaneously() {
        // scalar problem with a blow-up: both factor curves vanish together
        let x1 = dare_state_to_block(&scalar(2.0), &scalar(1.0), &scalar(1.0)).unwrap();
        let problem = build_flow_problem(&PairClass::class_s1(1), &x1, &tol()).unwrap();
        let q_list = scan_singular_times(
            &|t| Ok(smallest_singular(&problem.q_factor(t)?)),
            (-3.0, 3.0),
            1201,
            1e-5,
        )
        .unwrap();
        let qs_list = scan_singular_times(
            &|t| Ok(smallest_singular(&problem.qstar_factor(t)?)),
            (-3.0, 3.0),
            1201,
            1e-5,
        )
        .unwrap();
        assert!(!q_list.times.is_empty());
        assert_eq!(q_list.times.len(), qs_list.times.len());
        for (a, b) in q_list.times.iter().zip(qs_list.times.iter()) {
            assert!((a.t - b.t).abs() < 1e-6, "{} vs {}", a.t, b.t);
        }
        let _ = Complex64::new(0.0, 0.0);
    }
}
