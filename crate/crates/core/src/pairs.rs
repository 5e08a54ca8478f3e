//! Symplectic-pair classes, the Hermitian-block parameterization, spectral
//! splitting and Hamiltonian flow generators.
//!
//! A class is fixed by two symplectic matrices `(S1, S2)`; a Hermitian
//! `2n x 2n` block matrix `X` parameterizes the pair
//!
//! ```text
//! M = [[X12, 0], [X22, I]] S2,       L = [[I, X11], [0, X21]] S1.
//! ```
//!
//! The two presets are the doubling-algorithm classes: `class_s1` with
//! `(I, I)`, whose pairs look like `([[A, 0], [H, I]], [[I, G], [0, A^H]])`,
//! and `class_s2`, whose pairs look like `([[A, 0], [Q, -I]], [[P, I], [A^H, 0]])`.

use crate::error::{Error, Result};
use crate::linalg::{
    self, eigenvalues, hermitian_part, identity, is_hermitian, is_symplectic, make_j, mat_log,
    null_space, qz_decompose, qz_reorder, rank, smallest_singular, solve, zeros, CMatrix,
    GeneralizedSchur, Tolerances, ONE,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `J_k`, allowing the empty case `k = 0`.
pub(crate) fn j_block(k: usize) -> CMatrix {
    if k == 0 {
        zeros(0, 0)
    } else {
        make_j(k).expect("k >= 1")
    }
}

pub(crate) fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Exact inverse of a symplectic matrix: `S^{-1} = -J S^H J`.
pub fn symplectic_inverse(s: &CMatrix) -> Result<CMatrix> {
    let n = linalg::check_even_square(s, "symplectic_inverse input")?;
    let j = make_j(n)?;
    Ok(-(&j * s.adjoint() * &j))
}

/// A class of symplectic pairs fixed by two symplectic matrices.
#[derive(Debug, Clone)]
pub struct PairClass {
    pub s1: CMatrix,
    pub s2: CMatrix,
}

impl PairClass {
    pub fn new(s1: CMatrix, s2: CMatrix, tol: &Tolerances) -> Result<Self> {
        if s1.shape() != s2.shape() {
            return Err(Error::Dimension("class factors must have equal shape".into()));
        }
        if !is_symplectic(&s1, tol)? || !is_symplectic(&s2, tol)? {
            return Err(Error::Input("class factors must be symplectic".into()));
        }
        Ok(PairClass { s1, s2 })
    }

    /// The doubling class of DARE pairs `([[A, 0], [H, I]], [[I, G], [0, A^H]])`.
    pub fn class_s1(n: usize) -> Self {
        PairClass {
            s1: identity(2 * n),
            s2: identity(2 * n),
        }
    }

    /// The doubling class of NME pairs `([[A, 0], [Q, -I]], [[P, I], [A^H, 0]])`.
    ///
    /// The factor bound to `L` is `J` and the factor bound to `M` is `-I`;
    /// with `X = -[[P, A], [A^H, Q]]` the parameterization reproduces those
    /// block shapes exactly.
    pub fn class_s2(n: usize) -> Self {
        PairClass {
            s1: make_j(n).expect("n >= 1"),
            s2: identity(2 * n).scale(-1.0),
        }
    }

    pub fn half_dim(&self) -> usize {
        self.s1.nrows() / 2
    }

    pub fn is_s1_preset(&self) -> bool {
        let n = self.half_dim();
        (&self.s1 - identity(2 * n)).norm() == 0.0 && (&self.s2 - identity(2 * n)).norm() == 0.0
    }

    pub fn is_s2_preset(&self) -> bool {
        let n = self.half_dim();
        (&self.s1 - j_block(n)).norm() == 0.0 && (&self.s2 + identity(2 * n)).norm() == 0.0
    }
}

/// The Hermitian `2n x 2n` matrix `[[X11, X12], [X21, X22]]` parameterizing a
/// pair within a class.
#[derive(Debug, Clone)]
pub struct HermitianBlock {
    pub x11: CMatrix,
    pub x12: CMatrix,
    pub x21: CMatrix,
    pub x22: CMatrix,
}

impl HermitianBlock {
    pub fn new(
        x11: CMatrix,
        x12: CMatrix,
        x21: CMatrix,
        x22: CMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = x11.nrows();
        for (name, m) in [("X11", &x11), ("X12", &x12), ("X21", &x21), ("X22", &x22)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension(format!("{name} must be {n}x{n}")));
            }
        }
        let block = HermitianBlock { x11, x12, x21, x22 };
        if !is_hermitian(&block.assemble(), tol)? {
            return Err(Error::Input("assembled X is not Hermitian".into()));
        }
        Ok(block)
    }

    /// Assemble without the Hermitian validation; used where structure is a
    /// property to be measured rather than an input contract.
    pub fn raw(x11: CMatrix, x12: CMatrix, x21: CMatrix, x22: CMatrix) -> Self {
        HermitianBlock { x11, x12, x21, x22 }
    }

    pub fn from_assembled(x: &CMatrix, tol: &Tolerances) -> Result<Self> {
        let n = linalg::check_even_square(x, "assembled X")?;
        HermitianBlock::new(
            x.view((0, 0), (n, n)).into(),
            x.view((0, n), (n, n)).into(),
            x.view((n, 0), (n, n)).into(),
            x.view((n, n), (n, n)).into(),
            tol,
        )
    }

    pub fn assemble(&self) -> CMatrix {
        let n = self.x11.nrows();
        let mut x = zeros(2 * n, 2 * n);
        x.view_mut((0, 0), (n, n)).copy_from(&self.x11);
        x.view_mut((0, n), (n, n)).copy_from(&self.x12);
        x.view_mut((n, 0), (n, n)).copy_from(&self.x21);
        x.view_mut((n, n), (n, n)).copy_from(&self.x22);
        x
    }

    pub fn half_dim(&self) -> usize {
        self.x11.nrows()
    }
}

/// A pair `(M, L)` with `M J M^H = L J L^H`.
#[derive(Debug, Clone)]
pub struct SymplecticPair {
    pub m: CMatrix,
    pub l: CMatrix,
}

impl SymplecticPair {
    pub fn new(m: CMatrix, l: CMatrix, tol: &Tolerances) -> Result<Self> {
        let n = linalg::check_even_square(&m, "pair factor M")?;
        if l.shape() != m.shape() {
            return Err(Error::Dimension("pair factors must have equal shape".into()));
        }
        let j = make_j(n)?;
        let resid = (&m * &j * m.adjoint() - &l * &j * l.adjoint()).norm();
        let scale = (m.norm_squared() + l.norm_squared()).max(1.0);
        if resid > tol.structural_tol * scale {
            return Err(Error::Input(format!(
                "not a symplectic pair: residual {resid:.3e} over scale {scale:.3e}"
            )));
        }
        Ok(SymplecticPair { m, l })
    }

    pub fn half_dim(&self) -> usize {
        self.m.nrows() / 2
    }
}

/// Assemble the pair parameterized by `x` within `class`.
pub fn to_pair(x: &HermitianBlock, class: &PairClass) -> Result<SymplecticPair> {
    let n = x.half_dim();
    if class.half_dim() != n {
        return Err(Error::Dimension(format!(
            "class is for half-dimension {}, X has {}",
            class.half_dim(),
            n
        )));
    }
    let mut mfac = zeros(2 * n, 2 * n);
    mfac.view_mut((0, 0), (n, n)).copy_from(&x.x12);
    mfac.view_mut((n, 0), (n, n)).copy_from(&x.x22);
    mfac.view_mut((n, n), (n, n)).copy_from(&identity(n));
    let mut lfac = zeros(2 * n, 2 * n);
    lfac.view_mut((0, 0), (n, n)).copy_from(&identity(n));
    lfac.view_mut((0, n), (n, n)).copy_from(&x.x11);
    lfac.view_mut((n, n), (n, n)).copy_from(&x.x21);
    SymplecticPair::new(mfac * &class.s2, lfac * &class.s1, &Tolerances::default())
}

/// Recover the Hermitian block of a pair relative to `class`, normalizing by
/// the factor built from the first block-column of `L S1^{-1}` and the second
/// block-column of `M S2^{-1}`.
pub fn from_pair(
    pair: &SymplecticPair,
    class: &PairClass,
    tol: &Tolerances,
) -> Result<HermitianBlock> {
    let n = pair.half_dim();
    if class.half_dim() != n {
        return Err(Error::Dimension("class/pair dimension mismatch".into()));
    }
    let l_s1 = &pair.l * symplectic_inverse(&class.s1)?;
    let m_s2 = &pair.m * symplectic_inverse(&class.s2)?;
    let mut c = zeros(2 * n, 2 * n);
    c.view_mut((0, 0), (2 * n, n))
        .copy_from(&l_s1.view((0, 0), (2 * n, n)));
    c.view_mut((0, n), (2 * n, n))
        .copy_from(&m_s2.view((0, n), (2 * n, n)));
    let sigma = smallest_singular(&c);
    if sigma <= tol.rank_tol * c.norm().max(1.0) {
        return Err(Error::NotInClass(format!(
            "normalizing factor is singular (sigma_min = {sigma:.3e})"
        )));
    }
    let xm = solve(&c, &m_s2)?;
    let xl = solve(&c, &l_s1)?;
    let x12 = CMatrix::from(xm.view((0, 0), (n, n)));
    let x22 = CMatrix::from(xm.view((n, 0), (n, n)));
    let x11 = CMatrix::from(xl.view((0, n), (n, n)));
    let x21 = CMatrix::from(xl.view((n, n), (n, n)));
    // enforce the Hermitian structure exactly
    let x12 = (&x12 + x21.adjoint()).scale(0.5);
    HermitianBlock::new(
        hermitian_part(&x11),
        x12.clone(),
        x12.adjoint(),
        hermitian_part(&x22),
        tol,
    )
}

/// Index of the pencil at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexAtInfinity {
    Zero,
    One,
    TooHigh,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub regular: bool,
    pub ind_inf: IndexAtInfinity,
    pub n_infinite: usize,
    pub n_zero: usize,
    pub kernel_dim_l: usize,
    pub kernel_dim_m: usize,
}

/// Generalized Schur form of `(M, L)` obtained through a Moebius substitution
/// `(M - sigma1 L, M - sigma2 L)` that makes both pencil factors invertible,
/// so the QZ iteration never meets an infinite eigenvalue. The triangular
/// factors are mapped back to the original pencil afterwards.
fn regularized_qz(m: &CMatrix, l: &CMatrix, tol: &Tolerances) -> Result<GeneralizedSchur> {
    let scale = (m.norm() / l.norm().max(1e-300)).clamp(1e-2, 1e2);
    let mut rng = ChaCha8Rng::seed_from_u64(0x600D_5EED);
    for _attempt in 0..8 {
        let ang1: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let ang2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let sigma1 = Complex64::from_polar(scale, ang1);
        let sigma2 = Complex64::from_polar(scale * 1.37, ang2);
        let a = m - l.map(|x| x * sigma1);
        let b = m - l.map(|x| x * sigma2);
        let floor = tol.rank_tol * (m.norm() + l.norm()).max(1.0);
        if smallest_singular(&a) <= floor || smallest_singular(&b) <= floor {
            continue;
        }
        let gs = qz_decompose(&a, &b)?;
        let d = ONE / (sigma2 - sigma1);
        let s_orig = &gs.s + (&gs.s - &gs.t).map(|x| x * (sigma1 * d));
        let t_orig = (&gs.s - &gs.t).map(|x| x * d);
        return Ok(GeneralizedSchur {
            s: s_orig,
            t: t_orig,
            q: gs.q,
            z: gs.z,
        });
    }
    Err(Error::NotRegular)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EigClass {
    Zero,
    Finite,
    Infinite,
}

fn classify_eig(alpha: Complex64, beta: Complex64, tol: &Tolerances) -> EigClass {
    if alpha.norm() <= tol.eig_zero_tol * beta.norm() {
        EigClass::Zero
    } else if alpha.norm() >= tol.eig_inf_tol * beta.norm() {
        EigClass::Infinite
    } else {
        EigClass::Finite
    }
}

/// Regularity probe (smallest singular value of `M - lambda L` at random
/// `lambda`) and index classification from generalized-eigenvalue counts.
pub fn classify(pair: &SymplecticPair, tol: &Tolerances) -> Result<Classification> {
    let n2 = pair.m.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1A5_51F7);
    let scale = (pair.m.norm() / pair.l.norm().max(1e-300)).clamp(1e-2, 1e2);
    let mut regular = false;
    for _ in 0..5 {
        let lambda = Complex64::from_polar(
            scale * rng.gen_range(0.5..2.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let probe = &pair.m - pair.l.map(|x| x * lambda);
        let floor = tol.rank_tol * (pair.m.norm() + lambda.norm() * pair.l.norm()).max(1.0);
        if smallest_singular(&probe) > floor {
            regular = true;
            break;
        }
    }
    let kernel_dim_l = n2 - rank(&pair.l, tol);
    let kernel_dim_m = n2 - rank(&pair.m, tol);
    let (n_infinite, n_zero) = if regular {
        let gs = regularized_qz(&pair.m, &pair.l, tol)?;
        let mut inf = 0;
        let mut zero = 0;
        for (alpha, beta) in gs.eigen_pairs() {
            match classify_eig(alpha, beta, tol) {
                EigClass::Infinite => inf += 1,
                EigClass::Zero => zero += 1,
                EigClass::Finite => {}
            }
        }
        (inf, zero)
    } else {
        (0, 0)
    };
    let ind_inf = if kernel_dim_l == 0 {
        IndexAtInfinity::Zero
    } else if n_infinite == kernel_dim_l {
        IndexAtInfinity::One
    } else {
        IndexAtInfinity::TooHigh
    };
    Ok(Classification {
        regular,
        ind_inf,
        n_infinite,
        n_zero,
        kernel_dim_l,
        kernel_dim_m,
    })
}

/// Bases for the zero, infinite and finite-nonzero spectral parts of a pair.
#[derive(Debug, Clone)]
pub struct EigenSplit {
    /// Deflating subspace of the finite-nonzero eigenvalues, congruence
    /// normalized so `U1^H J U1 = J_nhat`. `2n x 2nhat`.
    pub u1: CMatrix,
    /// Kernel of `M`. `2n x ell`.
    pub u0: CMatrix,
    /// Kernel of `L`, rescaled so `[U0, Uinf]^H J [U0, Uinf] = J_ell`.
    pub uinf: CMatrix,
    /// Symplectic coefficient with `M U1 = L U1 Shat`.
    pub shat: CMatrix,
    pub nhat: usize,
    pub ell: usize,
    /// Relative least-squares residual of the `Shat` relation.
    pub residual: f64,
}

impl EigenSplit {
    /// The square matrix `U = [U1 | U0, Uinf]`.
    pub fn stacked(&self) -> CMatrix {
        let n2 = self.u1.nrows();
        let mut u = zeros(n2, n2);
        u.view_mut((0, 0), (n2, 2 * self.nhat)).copy_from(&self.u1);
        u.view_mut((0, 2 * self.nhat), (n2, self.ell)).copy_from(&self.u0);
        u.view_mut((0, 2 * self.nhat + self.ell), (n2, self.ell))
            .copy_from(&self.uinf);
        u
    }

    /// `U^{-1} = (J_nhat (+) J_ell)^H U^H J`, exact when the congruence holds.
    pub fn stacked_inverse(&self) -> CMatrix {
        let n = self.u1.nrows() / 2;
        let jj = block_diag(&[&j_block(self.nhat), &j_block(self.ell)]);
        jj.adjoint() * self.stacked().adjoint() * make_j(n).expect("n >= 1")
    }
}

/// Congruence normalization: a `W` with `W^H K W = J_k` for nonsingular
/// skew-Hermitian `K`. Eigenvalues of the Hermitian `i K` are sorted by sign
/// (original order kept inside each group) and scaled by `|lambda|^{-1/2}`.
fn congruence_to_j(k: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let two_k = k.nrows();
    if two_k == 0 {
        return Ok(zeros(0, 0));
    }
    let khalf = two_k / 2;
    let ik = hermitian_part(&k.map(|x| x * Complex64::new(0.0, 1.0)));
    let se = ik.symmetric_eigen();
    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    let top = se.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    for (i, &ev) in se.eigenvalues.iter().enumerate() {
        if ev.abs() <= tol.rank_tol * top.max(1.0) {
            return Err(Error::NumericalBreakdown(
                "congruence normalization: near-singular J-gram matrix".into(),
            ));
        }
        if ev > 0.0 {
            pos.push(i);
        } else {
            neg.push(i);
        }
    }
    if pos.len() != khalf || neg.len() != khalf {
        return Err(Error::NumericalBreakdown(format!(
            "congruence normalization: inertia ({}, {}) instead of ({khalf}, {khalf})",
            pos.len(),
            neg.len()
        )));
    }
    let mut w0 = zeros(two_k, two_k);
    for (col, &i) in pos.iter().chain(neg.iter()).enumerate() {
        let s = 1.0 / se.eigenvalues[i].abs().sqrt();
        w0.set_column(col, &se.eigenvectors.column(i).map(|x| x * s));
    }
    // unitary C with C^H diag(I, -I) C = i J_k
    let mut c = zeros(two_k, two_k);
    let f = std::f64::consts::FRAC_1_SQRT_2;
    for jcol in 0..khalf {
        c[(jcol, jcol)] = Complex64::new(f, 0.0);
        c[(jcol, khalf + jcol)] = Complex64::new(0.0, f);
        c[(khalf + jcol, jcol)] = Complex64::new(f, 0.0);
        c[(khalf + jcol, khalf + jcol)] = Complex64::new(0.0, -f);
    }
    Ok(w0 * c)
}

/// Split a regular pair of index at most one into its zero, infinite and
/// finite-nonzero spectral parts.
pub fn eigen_split(pair: &SymplecticPair, tol: &Tolerances) -> Result<EigenSplit> {
    let n = pair.half_dim();
    let cls = classify(pair, tol)?;
    if !cls.regular {
        return Err(Error::NotRegular);
    }
    if cls.ind_inf == IndexAtInfinity::TooHigh {
        return Err(Error::IndexTooHigh);
    }
    let u0 = null_space(&pair.m, tol);
    let mut uinf = null_space(&pair.l, tol);
    let ell = u0.ncols();
    if uinf.ncols() != ell {
        return Err(Error::NumericalBreakdown(format!(
            "kernel dimensions differ: dim ker M = {ell}, dim ker L = {}",
            uinf.ncols()
        )));
    }
    if ell > n {
        return Err(Error::NumericalBreakdown("kernel larger than half dimension".into()));
    }
    let nhat = n - ell;
    let j = make_j(n)?;

    let u1 = if nhat > 0 {
        let mut gs = regularized_qz(&pair.m, &pair.l, tol)?;
        let select: Vec<bool> = gs
            .eigen_pairs()
            .iter()
            .map(|&(a, b)| classify_eig(a, b, tol) == EigClass::Finite)
            .collect();
        let picked = qz_reorder(&mut gs, &select);
        if picked != 2 * nhat {
            return Err(Error::NumericalBreakdown(format!(
                "expected {} finite-nonzero eigenvalues, found {picked}",
                2 * nhat
            )));
        }
        let u1_pre = CMatrix::from(gs.z.view((0, 0), (2 * n, 2 * nhat)));
        let k1 = u1_pre.adjoint() * &j * &u1_pre;
        let w = congruence_to_j(&k1, tol)?;
        u1_pre * w
    } else {
        zeros(2 * n, 0)
    };

    if ell > 0 {
        let k2 = u0.adjoint() * &j * &uinf;
        if smallest_singular(&k2) <= tol.rank_tol * k2.norm().max(1.0) {
            return Err(Error::NumericalBreakdown("kernel bases are not J-paired".into()));
        }
        uinf = &uinf * linalg::inverse(&k2)?;
    }

    let (shat, residual) = if nhat > 0 {
        let lu1 = &pair.l * &u1;
        let mu1 = &pair.m * &u1;
        let gram = lu1.adjoint() * &lu1;
        let rhs = lu1.adjoint() * &mu1;
        let shat = solve(&gram, &rhs)?;
        let resid = (&mu1 - &lu1 * &shat).norm()
            / (pair.m.norm() + pair.l.norm() * shat.norm()).max(1.0);
        (shat, resid)
    } else {
        (zeros(0, 0), 0.0)
    };
    if residual > tol.structural_tol {
        return Err(Error::NumericalBreakdown(format!(
            "deflating relation residual {residual:.3e}"
        )));
    }

    Ok(EigenSplit {
        u1,
        u0,
        uinf,
        shat,
        nhat,
        ell,
        residual,
    })
}

/// The Hamiltonian generator of a pair: `Hhat = Log(Shat)` on the finite
/// part, extended by zero on the kernels, with the projectors carrying the
/// relation `M Pi0 = L PiInf e^H`.
#[derive(Debug, Clone)]
pub struct FlowGenerator {
    pub h: CMatrix,
    pub hhat: CMatrix,
    pub pi0: CMatrix,
    pub pi_inf: CMatrix,
}

pub fn build_generator(pair: &SymplecticPair, split: &EigenSplit) -> Result<FlowGenerator> {
    if split.u1.nrows() != pair.m.nrows() {
        return Err(Error::Dimension("split does not belong to this pair".into()));
    }
    let hhat = mat_log(&split.shat)?;
    let (nhat, ell) = (split.nhat, split.ell);
    let u = split.stacked();
    let uinv = split.stacked_inverse();

    let zero_2l = zeros(2 * ell, 2 * ell);
    let h_core = block_diag(&[&hhat, &zero_2l]);
    let h = linalg::hamiltonian_part(&(&u * h_core * &uinv))?;

    let eye_2nhat = identity(2 * nhat);
    let eye_l = identity(ell);
    let zero_l = zeros(ell, ell);
    let pi0 = &u * block_diag(&[&eye_2nhat, &eye_l, &zero_l]) * &uinv;
    let pi_inf = &u * block_diag(&[&eye_2nhat, &zero_l, &eye_l]) * &uinv;

    Ok(FlowGenerator { h, hhat, pi0, pi_inf })
}

/// Structured perturbation with `Phi = eps I` that keeps every invariant
/// subspace while moving the zero and infinite eigenvalues to `eps`, `1/eps`.
pub fn perturb(pair: &SymplecticPair, split: &EigenSplit, eps: f64) -> Result<SymplecticPair> {
    if eps < 0.0 {
        return Err(Error::Input("perturbation size must be nonnegative".into()));
    }
    if split.ell == 0 || eps == 0.0 {
        return Ok(pair.clone());
    }
    let n = pair.half_dim();
    let j = make_j(n)?;
    let dm = -(&pair.l * &split.u0 * split.uinf.adjoint() * &j).scale(eps);
    let dl = (&pair.m * &split.uinf * split.u0.adjoint() * &j).scale(eps);
    SymplecticPair::new(&pair.m + dm, &pair.l + dl, &Tolerances::default())
}

/// The Hermitian block matching an SDA-1 state `(A, G, H)`:
/// `X = [[G, A], [A^H, -H]]`.
pub fn dare_state_to_block(a: &CMatrix, g: &CMatrix, h: &CMatrix) -> Result<HermitianBlock> {
    HermitianBlock::new(g.clone(), a.clone(), a.adjoint(), -h, &Tolerances::default())
}

/// The Hermitian block matching an SDA-2 state `(A, Q, P)`:
/// `X = [[P, -A], [-A^H, -Q]]`.
pub fn nme_state_to_block(a: &CMatrix, q: &CMatrix, p: &CMatrix) -> Result<HermitianBlock> {
    HermitianBlock::new(p.clone(), -a, -a.adjoint(), -q, &Tolerances::default())
}

/// True when the spectra agree as multisets within `tol` (absolute over the
/// spectral scale).
pub fn spectra_match(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<bool> {
    let mut ea = eigenvalues(a)?;
    let mut eb = eigenvalues(b)?;
    let key = |x: &Complex64| (x.re, x.im);
    ea.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    eb.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    let scale = ea.iter().map(|x| x.norm()).fold(1.0f64, f64::max);
    Ok(ea
        .iter()
        .zip(eb.iter())
        .all(|(x, y)| (x - y).norm() <= tol * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{mat_exp, random_instance, rel_err, RandomKind};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn random_block(n: usize, seed: u64) -> HermitianBlock {
        let x = random_instance(RandomKind::Hermitian, 2 * n, seed);
        HermitianBlock::from_assembled(&x, &tol()).unwrap()
    }

    fn random_class(n: usize, seed: u64) -> PairClass {
        PairClass::new(
            random_instance(RandomKind::Symplectic, n, seed),
            random_instance(RandomKind::Symplectic, n, seed + 1),
            &tol(),
        )
        .unwrap()
    }

    fn random_nonhermitian(n: usize, seed: u64) -> CMatrix {
        random_instance(RandomKind::Hermitian, n, seed)
            + random_instance(RandomKind::Hermitian, n, seed + 1000)
                .map(|v| v * Complex64::new(0.0, 1.0))
    }

    /// Index-one symplectic pair in the (I, I) class: a rank-deficient `A`
    /// puts kernels into both factors.
    pub(crate) fn random_index_one_pair(n: usize, ell: usize, seed: u64) -> SymplecticPair {
        let a0 = random_nonhermitian(n, seed);
        let svd = a0.svd(true, true);
        let u = svd.u.unwrap();
        let vt = svd.v_t.unwrap();
        let mut pairs: Vec<(f64, usize)> = svd
            .singular_values
            .iter()
            .copied()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
        let mut d = zeros(n, n);
        for (rankpos, &(s, i)) in pairs.iter().enumerate() {
            d[(i, i)] = if rankpos < n - ell {
                Complex64::new(s, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let a = u * d * vt;
        let g = random_instance(RandomKind::Hermitian, n, seed + 1);
        let h = random_instance(RandomKind::Hermitian, n, seed + 2);
        let x = dare_state_to_block(&a, &g, &h).unwrap();
        to_pair(&x, &PairClass::class_s1(n)).unwrap()
    }

    #[test]
    fn to_pair_zero_block_identity_class() {
        let class = PairClass::class_s1(2);
        let z = zeros(2, 2);
        let x = HermitianBlock::new(z.clone(), z.clone(), z.clone(), z.clone(), &tol()).unwrap();
        let pair = to_pair(&x, &class).unwrap();
        let mut m_expect = zeros(4, 4);
        m_expect.view_mut((2, 2), (2, 2)).copy_from(&identity(2));
        let mut l_expect = zeros(4, 4);
        l_expect.view_mut((0, 0), (2, 2)).copy_from(&identity(2));
        assert_eq!(pair.m, m_expect);
        assert_eq!(pair.l, l_expect);
    }

    #[test]
    fn to_pair_s2_class_has_nme_shape() {
        // X = -[[P, A], [A^H, Q]] maps onto ([[A, 0], [Q, -I]], [[P, I], [A^H, 0]]).
        let n = 2;
        let a = random_nonhermitian(n, 50);
        let q = random_instance(RandomKind::Hermitian, n, 52);
        let p = random_instance(RandomKind::Hermitian, n, 53);
        let x = nme_state_to_block(&a, &q, &(-p.clone())).unwrap();
        let pair = to_pair(&x, &PairClass::class_s2(n)).unwrap();
        assert!((pair.m.view((0, 0), (n, n)).clone_owned() - &a).norm() < 1e-14);
        assert!(pair.m.view((0, n), (n, n)).norm() < 1e-14);
        assert!((pair.m.view((n, 0), (n, n)).clone_owned() - &q).norm() < 1e-14);
        assert!((pair.m.view((n, n), (n, n)).clone_owned() + identity(n)).norm() < 1e-14);
        assert!((pair.l.view((0, 0), (n, n)).clone_owned() - &p).norm() < 1e-14);
        assert!((pair.l.view((0, n), (n, n)).clone_owned() - identity(n)).norm() < 1e-14);
        assert!((pair.l.view((n, 0), (n, n)).clone_owned() - a.adjoint()).norm() < 1e-14);
        assert!(pair.l.view((n, n), (n, n)).norm() < 1e-14);
    }

    #[test]
    fn to_pair_is_symplectic_for_random_class() {
        for seed in [3u64, 8, 21] {
            let class = random_class(2, seed);
            let x = random_block(2, seed + 5);
            let pair = to_pair(&x, &class).unwrap();
            let j = make_j(2).unwrap();
            let resid =
                (&pair.m * &j * pair.m.adjoint() - &pair.l * &j * pair.l.adjoint()).norm();
            let scale = (pair.m.norm_squared() + pair.l.norm_squared()).max(1.0);
            assert!(resid <= 1e-10 * scale);
        }
    }

    #[test]
    fn from_pair_roundtrip() {
        let class = random_class(3, 77);
        let x = random_block(3, 79);
        let pair = to_pair(&x, &class).unwrap();
        let back = from_pair(&pair, &class, &tol()).unwrap();
        assert!((back.assemble() - x.assemble()).norm() < 1e-12);
    }

    #[test]
    fn from_pair_left_equivalence_invariance() {
        let class = random_class(2, 91);
        let x = random_block(2, 93);
        let pair = to_pair(&x, &class).unwrap();
        let c = random_nonhermitian(4, 95) + identity(4).scale(3.0);
        let moved = SymplecticPair {
            m: &c * &pair.m,
            l: &c * &pair.l,
        };
        let back = from_pair(&moved, &class, &tol()).unwrap();
        assert!(rel_err(&back.assemble(), &x.assemble()) < 1e-10);
    }

    #[test]
    fn from_pair_reads_off_dare_data() {
        // ([[A, 0], [H, I]], [[I, G], [0, A^H]]) recovers X12 = A, X11 = G,
        // X22 = H in the (I, I) class.
        let n = 2;
        let a = random_nonhermitian(n, 60);
        let g = random_instance(RandomKind::Hermitian, n, 62);
        let h = random_instance(RandomKind::Hermitian, n, 63);
        let mut m = zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&a);
        m.view_mut((n, 0), (n, n)).copy_from(&h);
        m.view_mut((n, n), (n, n)).copy_from(&identity(n));
        let mut l = zeros(2 * n, 2 * n);
        l.view_mut((0, 0), (n, n)).copy_from(&identity(n));
        l.view_mut((0, n), (n, n)).copy_from(&g);
        l.view_mut((n, n), (n, n)).copy_from(&a.adjoint());
        let pair = SymplecticPair::new(m, l, &tol()).unwrap();
        let x = from_pair(&pair, &PairClass::class_s1(n), &tol()).unwrap();
        assert!((x.x12 - &a).norm() < 1e-12);
        assert!((x.x11 - &g).norm() < 1e-12);
        assert!((x.x22 - &h).norm() < 1e-12);
    }

    #[test]
    fn classify_identity_pair() {
        let pair = SymplecticPair::new(identity(4), identity(4), &tol()).unwrap();
        let c = classify(&pair, &tol()).unwrap();
        assert!(c.regular);
        assert_eq!(c.ind_inf, IndexAtInfinity::Zero);
    }

    #[test]
    fn classify_index_one_pair() {
        let mut m = zeros(2, 2);
        m[(1, 1)] = ONE;
        let mut l = zeros(2, 2);
        l[(0, 0)] = ONE;
        let pair = SymplecticPair::new(m, l, &tol()).unwrap();
        let c = classify(&pair, &tol()).unwrap();
        assert!(c.regular);
        assert_eq!(c.ind_inf, IndexAtInfinity::One);
        assert_eq!(c.n_infinite, 1);
        assert_eq!(c.n_zero, 1);
    }

    #[test]
    fn eigen_split_invertible_pair_keeps_spectrum() {
        // (e^{H0}, I): ell = 0, Shat similar to e^{H0}.
        let h0 = random_instance(RandomKind::Hamiltonian, 2, 7).scale(0.5);
        let e = mat_exp(&h0).unwrap();
        let pair = SymplecticPair::new(e.clone(), identity(4), &tol()).unwrap();
        let split = eigen_split(&pair, &tol()).unwrap();
        assert_eq!(split.ell, 0);
        assert_eq!(split.nhat, 2);
        assert!(spectra_match(&split.shat, &e, 1e-8).unwrap());
        assert!(is_symplectic(&split.shat, &tol()).unwrap());
    }

    #[test]
    fn eigen_split_kernel_pair() {
        let mut m = zeros(2, 2);
        m[(1, 1)] = ONE;
        let mut l = zeros(2, 2);
        l[(0, 0)] = ONE;
        let pair = SymplecticPair::new(m, l, &tol()).unwrap();
        let split = eigen_split(&pair, &tol()).unwrap();
        assert_eq!(split.nhat, 0);
        assert_eq!(split.ell, 1);
        // U0 spans e1, Uinf spans e2, U0^H J Uinf = 1
        assert!(split.u0[(1, 0)].norm() < 1e-12);
        assert!(split.uinf[(0, 0)].norm() < 1e-12);
        let j = make_j(1).unwrap();
        let k2 = split.u0.adjoint() * &j * &split.uinf;
        assert!((k2[(0, 0)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn eigen_split_residuals_on_random_index_one_pair() {
        let n = 3;
        let pair = random_index_one_pair(n, 1, 300);
        let c = classify(&pair, &tol()).unwrap();
        assert!(c.regular);
        assert_eq!(c.ind_inf, IndexAtInfinity::One);
        let split = eigen_split(&pair, &tol()).unwrap();
        assert_eq!(split.ell, 1);
        assert_eq!(split.nhat, 2);
        let j = make_j(n).unwrap();
        // J-congruence of the stacked basis
        let u = split.stacked();
        let target = block_diag(&[&j_block(split.nhat), &j_block(split.ell)]);
        assert!((u.adjoint() * &j * &u - target).norm() < 1e-8);
        // kernel and deflating relations
        assert!((&pair.m * &split.u0).norm() < 1e-8 * pair.m.norm());
        assert!((&pair.l * &split.uinf).norm() < 1e-7 * pair.l.norm().max(1.0));
        assert!(split.residual < 1e-8);
        assert!(is_symplectic(&split.shat, &tol()).unwrap());
    }

    #[test]
    fn build_generator_invertible_pair() {
        // index 0: Pi0 = PiInf = I and M = L e^H
        let h0 = random_instance(RandomKind::Hamiltonian, 2, 17).scale(0.4);
        let e = mat_exp(&h0).unwrap();
        let pair = SymplecticPair::new(e.clone(), identity(4), &tol()).unwrap();
        let split = eigen_split(&pair, &tol()).unwrap();
        let gen = build_generator(&pair, &split).unwrap();
        assert!((&gen.pi0 - identity(4)).norm() < 1e-9);
        assert!((&gen.pi_inf - identity(4)).norm() < 1e-9);
        let eh = mat_exp(&gen.h).unwrap();
        assert!(rel_err(&(&pair.l * eh), &pair.m) < 1e-8);
    }

    #[test]
    fn build_generator_kernel_pair() {
        let mut m = zeros(2, 2);
        m[(1, 1)] = ONE;
        let mut l = zeros(2, 2);
        l[(0, 0)] = ONE;
        let pair = SymplecticPair::new(m, l, &tol()).unwrap();
        let split = eigen_split(&pair, &tol()).unwrap();
        let gen = build_generator(&pair, &split).unwrap();
        assert!(gen.h.norm() < 1e-12);
        let eh = mat_exp(&gen.h).unwrap();
        let resid = (&pair.m * &gen.pi0 - &pair.l * &gen.pi_inf * eh).norm();
        assert!(resid < 1e-12);
    }

    #[test]
    fn build_generator_random_index_one() {
        let pair = random_index_one_pair(3, 1, 420);
        let split = eigen_split(&pair, &tol()).unwrap();
        let gen = build_generator(&pair, &split).unwrap();
        let scale = pair.m.norm() + pair.l.norm();
        assert!((&gen.pi0 * &gen.pi0 - &gen.pi0).norm() < 1e-8);
        assert!((&gen.pi_inf * &gen.pi_inf - &gen.pi_inf).norm() < 1e-8);
        let eh = mat_exp(&gen.h).unwrap();
        let resid = (&pair.m * &gen.pi0 - &pair.l * &gen.pi_inf * &eh).norm();
        assert!(resid < 1e-8 * scale, "residual {resid:e}");
        let ehhat = mat_exp(&gen.hhat).unwrap();
        assert!(rel_err(&ehhat, &split.shat) < 1e-8);
    }

    #[test]
    fn perturb_makes_l_invertible() {
        let mut m = zeros(2, 2);
        m[(1, 1)] = ONE;
        let mut l = zeros(2, 2);
        l[(0, 0)] = ONE;
        let pair = SymplecticPair::new(m, l, &tol()).unwrap();
        let split = eigen_split(&pair, &tol()).unwrap();

        let same = perturb(&pair, &split, 0.0).unwrap();
        assert_eq!(same.m, pair.m);

        let eps = 0.1;
        let moved = perturb(&pair, &split, eps).unwrap();
        assert!(smallest_singular(&moved.l) > 1e-3);
        // M^eps U0 = L^eps U0 eps and M^eps Uinf eps = L^eps Uinf
        let r1 = (&moved.m * &split.u0 - (&moved.l * &split.u0).scale(eps)).norm();
        let r2 = ((&moved.m * &split.uinf).scale(eps) - &moved.l * &split.uinf).norm();
        assert!(r1 < 1e-12 && r2 < 1e-12);
    }

    #[test]
    fn perturb_index_zero_is_identity() {
        let e = mat_exp(&random_instance(RandomKind::Hamiltonian, 2, 2).scale(0.3)).unwrap();
        let pair = SymplecticPair::new(e, identity(4), &tol()).unwrap();
        let split = eigen_split(&pair, &tol()).unwrap();
        let moved = perturb(&pair, &split, 0.25).unwrap();
        assert_eq!(moved.m, pair.m);
        assert_eq!(moved.l, pair.l);
    }

    #[test]
    fn perturb_continuity_in_eps() {
        let pair = random_index_one_pair(3, 1, 511);
        let split = eigen_split(&pair, &tol()).unwrap();
        let scale = pair.m.norm() + pair.l.norm();
        for eps in [1e-2, 1e-4, 1e-6] {
            let moved = perturb(&pair, &split, eps).unwrap();
            let dm = (&moved.m - &pair.m).norm();
            let dl = (&moved.l - &pair.l).norm();
            assert!(dm <= 10.0 * eps * scale && dl <= 10.0 * eps * scale);
        }
    }
}
