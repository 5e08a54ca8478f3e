//! Hamiltonian Jordan canonical forms and their closed-form exponentials.
//!
//! A form is described symbolically by lists of four block kinds and
//! assembled as the Hamiltonian matrix
//!
//! ```text
//! J = [[R, D], [G, -R^H]]
//! ```
//!
//! with `R`, `D`, `G` block diagonal over the kinds in list order:
//! `r` blocks carry an off-axis eigenvalue (`Re > 0`), `e` blocks an
//! even-structured pure-imaginary eigenvalue, and `c`/`d` blocks the odd
//! coupled structure with one (`c`) or two (`d`) imaginary frequencies.
//! The exponential `e^{Jt}` is assembled blockwise from polynomial stencils,
//! never through a generic algorithm.

use crate::error::{Error, Result};
use crate::linalg::{zeros, CMatrix, CVector};
use crate::pairs::block_diag;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const MAX_BLOCK: usize = 20;

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(value: &Complex64, ser: S) -> Result<S::Ok, S::Error> {
        [value.re, value.im].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(de)?;
        Ok(Complex64::new(re, im))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RBlock {
    #[serde(with = "complex_pair")]
    pub lambda: Complex64,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EBlock {
    pub alpha: f64,
    pub beta: i8,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CBlock {
    pub eta: f64,
    pub beta: i8,
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DBlock {
    pub gamma: f64,
    pub delta: f64,
    pub beta: i8,
    pub s: usize,
    pub t: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct JordanSpec {
    #[serde(default)]
    pub r: Vec<RBlock>,
    #[serde(default)]
    pub e: Vec<EBlock>,
    #[serde(default)]
    pub c: Vec<CBlock>,
    #[serde(default)]
    pub d: Vec<DBlock>,
}

/// Width and offset of one block in the half-dimension layout, plus the
/// shared parameters of the coupled kinds.
#[derive(Debug, Clone)]
pub struct CdParams {
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
    pub m: usize,
    pub n: usize,
    /// offset of this block inside the cd segment of the layout
    pub offset: usize,
}

impl JordanSpec {
    pub fn validate(&self) -> Result<()> {
        let mut total = 0usize;
        for b in &self.r {
            if b.lambda.re <= 0.0 {
                return Err(Error::Spec("r block needs Re(lambda) > 0".into()));
            }
            if b.size == 0 {
                return Err(Error::Spec("r block needs size >= 1".into()));
            }
            total += b.size;
        }
        for b in &self.e {
            if b.beta != 1 && b.beta != -1 {
                return Err(Error::Spec("e block needs beta in {-1, 1}".into()));
            }
            if b.size == 0 {
                return Err(Error::Spec("e block needs size >= 1".into()));
            }
            total += b.size;
        }
        for b in &self.c {
            if b.beta != 1 && b.beta != -1 {
                return Err(Error::Spec("c block needs beta in {-1, 1}".into()));
            }
            total += b.m + b.n + 1;
        }
        for b in &self.d {
            if b.beta != 1 && b.beta != -1 {
                return Err(Error::Spec("d block needs beta in {-1, 1}".into()));
            }
            if b.gamma == b.delta {
                return Err(Error::Spec("d block needs gamma != delta".into()));
            }
            total += b.s + b.t + 1;
        }
        if total == 0 {
            return Err(Error::Spec("empty Jordan specification".into()));
        }
        let widest = self
            .r
            .iter()
            .map(|b| b.size)
            .chain(self.e.iter().map(|b| b.size))
            .chain(self.c.iter().flat_map(|b| [b.m, b.n]))
            .chain(self.d.iter().flat_map(|b| [b.s, b.t]))
            .max()
            .unwrap_or(0);
        if widest > MAX_BLOCK {
            return Err(Error::Spec(format!(
                "block size {widest} exceeds the factorial guard {MAX_BLOCK}"
            )));
        }
        Ok(())
    }

    pub fn half_dim(&self) -> usize {
        self.r_width() + self.e_width() + self.c_width() + self.d_width()
    }

    pub fn r_width(&self) -> usize {
        self.r.iter().map(|b| b.size).sum()
    }

    pub fn e_width(&self) -> usize {
        self.e.iter().map(|b| b.size).sum()
    }

    pub fn c_width(&self) -> usize {
        self.c.iter().map(|b| b.m + b.n + 1).sum()
    }

    pub fn d_width(&self) -> usize {
        self.d.iter().map(|b| b.s + b.t + 1).sum()
    }

    /// The coupled blocks in layout order (`c` first, then `d`), with
    /// offsets relative to the start of the cd segment.
    pub fn cd_params(&self) -> Vec<CdParams> {
        let mut out = Vec::new();
        let mut offset = 0usize;
        for b in &self.c {
            out.push(CdParams {
                gamma: b.eta,
                delta: b.eta,
                beta: b.beta as f64,
                m: b.m,
                n: b.n,
                offset,
            });
            offset += b.m + b.n + 1;
        }
        for b in &self.d {
            out.push(CdParams {
                gamma: b.gamma,
                delta: b.delta,
                beta: b.beta as f64,
                m: b.s,
                n: b.t,
                offset,
            });
            offset += b.s + b.t + 1;
        }
        out
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

fn unit_vec(len: usize, pos: usize) -> CVector {
    let mut v = CVector::zeros(len);
    if len > 0 {
        v[pos] = Complex64::new(1.0, 0.0);
    }
    v
}

/// Signed anti-diagonal `P_k` with `P[i, k-1-i] = (-1)^(i+1)`.
fn p_k(k: usize) -> CMatrix {
    let mut p = zeros(k, k);
    for i in 0..k {
        p[(i, k - 1 - i)] = Complex64::new(if i % 2 == 0 { -1.0 } else { 1.0 }, 0.0);
    }
    p
}

/// Upper triangular Toeplitz `Phi_k(t) = e^{N_k t}`.
fn phi_k(k: usize, t: f64) -> CMatrix {
    CMatrix::from_fn(k, k, |i, j| {
        if j >= i {
            Complex64::new(t.powi((j - i) as i32) / factorial(j - i), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `phi_k(t) = [t^k/k!, ..., t^2/2!, t]^T`.
fn phi_vec(k: usize, t: f64) -> CVector {
    CVector::from_fn(k, |i, _| {
        let p = k - i;
        Complex64::new(t.powi(p as i32) / factorial(p), 0.0)
    })
}

/// `psi_k(t) = [t, t^2/2!, ..., t^k/k!]^T`.
fn psi_vec(k: usize, t: f64) -> CVector {
    CVector::from_fn(k, |i, _| {
        let p = i + 1;
        Complex64::new(t.powi(p as i32) / factorial(p), 0.0)
    })
}

/// `Gamma_{k1}^{k2}(t)` with entries `t^(k1-i+j)/(k1-i+j)!`.
fn gamma_mat(k1: usize, k2: usize, t: f64) -> CMatrix {
    let m = k2 - k1 + 1;
    CMatrix::from_fn(m, m, |i, j| {
        let p = (k1 + j) as i32 - i as i32;
        Complex64::new(t.powi(p) / factorial(p as usize), 0.0)
    })
}

/// The six arrays of the exponential stencil at size `k`.
#[derive(Debug, Clone)]
pub struct ExpStencil {
    /// `Phi_k(t) = e^{N_k t}`
    pub phi: CMatrix,
    /// `PhiHat_k = P_k^{-1} Phi_k P_k = Phi_k^{-H}`
    pub phi_hat: CMatrix,
    /// `phi_k(t)`
    pub phi_small: CVector,
    /// `psi_k(t)`
    pub psi_small: CVector,
    /// `GammaHat_k^{2k-1} = Gamma_k^{2k-1} P_k`
    pub gamma_hat: CMatrix,
    /// signed anti-diagonal `P_k`
    pub p: CMatrix,
}

/// Evaluate the stencil arrays; `k = 0` yields empty arrays.
pub fn stencil(k: usize, t: f64) -> ExpStencil {
    let p = p_k(k);
    let phi = phi_k(k, t);
    // P_k^{-1} = (-1)^(k-1) P_k
    let p_inv = p.scale(if k % 2 == 1 { 1.0 } else { -1.0 });
    let phi_hat = &p_inv * &phi * &p;
    let gamma_hat = if k > 0 {
        gamma_mat(k, 2 * k - 1, t) * &p
    } else {
        zeros(0, 0)
    };
    ExpStencil {
        phi,
        phi_hat,
        phi_small: phi_vec(k, t),
        psi_small: psi_vec(k, t),
        gamma_hat,
        p,
    }
}

fn n_jordan(k: usize, lambda: Complex64) -> CMatrix {
    CMatrix::from_fn(k, k, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The `(R, D, G)` triple of a coupled block with frequencies `gamma`,
/// `delta` (equal for the `c` kind) and sizes `m`, `n`.
fn cd_block_parts(p: &CdParams) -> (CMatrix, CMatrix, CMatrix) {
    let (m, n) = (p.m, p.n);
    let w = m + n + 1;
    let i = Complex64::new(0.0, 1.0);
    let mut r = zeros(w, w);
    r.view_mut((0, 0), (m, m))
        .copy_from(&n_jordan(m, i * p.gamma));
    r.view_mut((m, m), (n, n))
        .copy_from(&n_jordan(n, i * p.delta));
    if m > 0 {
        r[(m - 1, w - 1)] = Complex64::new(-SQRT_HALF, 0.0);
    }
    if n > 0 {
        r[(m + n - 1, w - 1)] = Complex64::new(-SQRT_HALF, 0.0);
    }
    r[(w - 1, w - 1)] = i * (0.5 * (p.gamma + p.delta));

    let coef = i * (SQRT_HALF * p.beta);
    let mut d = zeros(w, w);
    if m > 0 {
        d[(m - 1, w - 1)] = coef;
        d[(w - 1, m - 1)] = -coef;
    }
    if n > 0 {
        d[(m + n - 1, w - 1)] = -coef;
        d[(w - 1, m + n - 1)] = coef;
    }
    d[(w - 1, w - 1)] = coef * (-i * SQRT_HALF * (p.gamma - p.delta));

    let mut g = zeros(w, w);
    g[(w - 1, w - 1)] = Complex64::new(-0.5 * p.beta * (p.gamma - p.delta), 0.0);
    (r, d, g)
}

/// Assemble the Hamiltonian matrix of a Jordan specification.
pub fn build_j(spec: &JordanSpec) -> Result<CMatrix> {
    spec.validate()?;
    let n = spec.half_dim();
    let mut r_blocks: Vec<CMatrix> = Vec::new();
    let mut d_blocks: Vec<CMatrix> = Vec::new();
    let mut g_blocks: Vec<CMatrix> = Vec::new();
    for b in &spec.r {
        r_blocks.push(n_jordan(b.size, b.lambda));
        d_blocks.push(zeros(b.size, b.size));
        g_blocks.push(zeros(b.size, b.size));
    }
    for b in &spec.e {
        let k = b.size;
        r_blocks.push(n_jordan(k, Complex64::new(0.0, b.alpha)));
        let e = unit_vec(k, k - 1);
        d_blocks.push(CMatrix::from_fn(k, k, |i, j| {
            e[i] * e[j].conj() * (b.beta as f64)
        }));
        g_blocks.push(zeros(k, k));
    }
    for p in spec.cd_params() {
        let (r, d, g) = cd_block_parts(&p);
        r_blocks.push(r);
        d_blocks.push(d);
        g_blocks.push(g);
    }
    let r_refs: Vec<&CMatrix> = r_blocks.iter().collect();
    let d_refs: Vec<&CMatrix> = d_blocks.iter().collect();
    let g_refs: Vec<&CMatrix> = g_blocks.iter().collect();
    let r = block_diag(&r_refs);
    let d = block_diag(&d_refs);
    let g = block_diag(&g_refs);

    let mut out = zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&r);
    out.view_mut((0, n), (n, n)).copy_from(&d);
    out.view_mut((n, 0), (n, n)).copy_from(&g);
    out.view_mut((n, n), (n, n)).copy_from(&(-r.adjoint()));
    Ok(out)
}

/// Exponential quadrants `(R, D, G, E)` of one coupled block.
fn cd_block_exp(p: &CdParams, t: f64) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let (m, n) = (p.m, p.n);
    let w = m + n + 1;
    let i = Complex64::new(0.0, 1.0);
    let eg = (i * (p.gamma * t)).exp();
    let ed = (i * (p.delta * t)).exp();
    let sm = stencil(m, t);
    let sn = stencil(n, t);
    let beta = p.beta;

    let om11 = (eg + ed) * 0.5;
    let om12 = -i * (beta * 0.5) * (eg - ed);
    let om21 = i * (beta * 0.5) * (eg - ed);
    let om22 = om11;

    // psi_hat^H = psi^H P as row vectors
    let psihat_m = (sm.psi_small.adjoint() * &sm.p).transpose(); // column of conjugates
    let psihat_n = (sn.psi_small.adjoint() * &sn.p).transpose();

    let mut bq = zeros(w, w);
    bq.view_mut((0, 0), (m, m)).copy_from(&sm.phi.map(|x| x * eg));
    bq.view_mut((m, m), (n, n)).copy_from(&sn.phi.map(|x| x * ed));
    for r in 0..m {
        bq[(r, w - 1)] = -SQRT_HALF * eg * sm.phi_small[r];
    }
    for r in 0..n {
        bq[(m + r, w - 1)] = -SQRT_HALF * ed * sn.phi_small[r];
    }
    bq[(w - 1, w - 1)] = om11;

    // the coupled kinds carry GammaHat_{k+1}^{2k}, not the stencil's
    // GammaHat_k^{2k-1}
    let gamma_hat_m = if m > 0 { gamma_mat(m + 1, 2 * m, t) * &sm.p } else { zeros(0, 0) };
    let gamma_hat_n = if n > 0 { gamma_mat(n + 1, 2 * n, t) * &sn.p } else { zeros(0, 0) };
    let mut dq = zeros(w, w);
    dq.view_mut((0, 0), (m, m))
        .copy_from(&gamma_hat_m.map(|x| x * (-i * beta * eg)));
    dq.view_mut((m, m), (n, n))
        .copy_from(&gamma_hat_n.map(|x| x * (i * beta * ed)));
    for r in 0..m {
        dq[(r, w - 1)] = i * (SQRT_HALF * beta) * eg * sm.phi_small[r];
    }
    for r in 0..n {
        dq[(m + r, w - 1)] = -i * (SQRT_HALF * beta) * ed * sn.phi_small[r];
    }
    for cidx in 0..m {
        dq[(w - 1, cidx)] = i * (SQRT_HALF * beta) * eg * psihat_m[cidx];
    }
    for cidx in 0..n {
        dq[(w - 1, m + cidx)] = -i * (SQRT_HALF * beta) * ed * psihat_n[cidx];
    }
    dq[(w - 1, w - 1)] = om12;

    let mut gq = zeros(w, w);
    gq[(w - 1, w - 1)] = om21;

    let mut eq = zeros(w, w);
    eq.view_mut((0, 0), (m, m))
        .copy_from(&sm.phi_hat.map(|x| x * eg));
    eq.view_mut((m, m), (n, n))
        .copy_from(&sn.phi_hat.map(|x| x * ed));
    for cidx in 0..m {
        eq[(w - 1, cidx)] = -SQRT_HALF * eg * psihat_m[cidx];
    }
    for cidx in 0..n {
        eq[(w - 1, m + cidx)] = -SQRT_HALF * ed * psihat_n[cidx];
    }
    eq[(w - 1, w - 1)] = om22;

    (bq, dq, gq, eq)
}

/// Evaluate `e^{Jt}` from the blockwise closed forms.
pub fn exp_j(spec: &JordanSpec, t: f64) -> Result<CMatrix> {
    spec.validate()?;
    let n = spec.half_dim();
    let i = Complex64::new(0.0, 1.0);
    let mut rr: Vec<CMatrix> = Vec::new();
    let mut dd: Vec<CMatrix> = Vec::new();
    let mut gg: Vec<CMatrix> = Vec::new();
    let mut ee: Vec<CMatrix> = Vec::new();
    for b in &spec.r {
        let s = stencil(b.size, t);
        let el = (b.lambda * t).exp();
        let el_conj = (-b.lambda.conj() * t).exp();
        rr.push(s.phi.map(|x| x * el));
        dd.push(zeros(b.size, b.size));
        gg.push(zeros(b.size, b.size));
        ee.push(s.phi_hat.map(|x| x * el_conj));
    }
    for b in &spec.e {
        let s = stencil(b.size, t);
        let ea = (i * (b.alpha * t)).exp();
        rr.push(s.phi.map(|x| x * ea));
        dd.push(s.gamma_hat.map(|x| x * (-ea * (b.beta as f64))));
        gg.push(zeros(b.size, b.size));
        ee.push(s.phi_hat.map(|x| x * ea));
    }
    for p in spec.cd_params() {
        let (bq, dq, gq, eq) = cd_block_exp(&p, t);
        rr.push(bq);
        dd.push(dq);
        gg.push(gq);
        ee.push(eq);
    }
    let collect = |v: &Vec<CMatrix>| {
        let refs: Vec<&CMatrix> = v.iter().collect();
        block_diag(&refs)
    };
    let (r, d, g, e) = (collect(&rr), collect(&dd), collect(&gg), collect(&ee));
    let mut out = zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&r);
    out.view_mut((0, n), (n, n)).copy_from(&d);
    out.view_mut((n, 0), (n, n)).copy_from(&g);
    out.view_mut((n, n), (n, n)).copy_from(&e);
    Ok(out)
}

/// Exact evaluation of `psihat_n^H (GammaHat_{n+1}^{2n}(t))^{-1} phi_n(t)`.
///
/// The entries are `+- t^p / p!` and any `f64` time is a dyadic rational, so
/// the bilinear form is a rational number; the reciprocal-factorial matrices
/// are far too ill conditioned for a double-precision solve at `n = 8`.
pub fn kappa_numeric(n: usize, t: f64) -> Result<f64> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    if n == 0 || n > MAX_BLOCK {
        return Err(Error::Spec(format!("kappa_numeric needs 1 <= n <= {MAX_BLOCK}")));
    }
    let tq = BigRational::from_float(t)
        .ok_or_else(|| Error::Input("kappa_numeric needs a finite t".into()))?;
    let fact = |k: usize| -> BigRational {
        let mut f = BigInt::one();
        for j in 1..=k {
            f *= BigInt::from(j);
        }
        BigRational::from_integer(f)
    };
    let powt = |p: usize| -> BigRational {
        let mut v = BigRational::one();
        for _ in 0..p {
            v *= &tq;
        }
        v
    };
    let term = |p: usize| powt(p) / fact(p);
    // GammaHat = Gamma_{n+1}^{2n} P_n: column j of GammaHat is +-column
    // (n-1-j) of Gamma with sign (-1)^(n-j)
    let mut a = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let gamma_col = n - 1 - j;
            let p = (n + 1 + gamma_col) - i;
            let sign = if (n - j) % 2 == 0 { 1 } else { -1 };
            *x = term(p) * BigRational::from_integer(BigInt::from(sign));
        }
    }
    // rhs phi_n, weights psihat^H = psi^H P: psihat[j] = psi[n-1-j] * (-1)^(n-j)
    let phi: Vec<BigRational> = (0..n).map(|i| term(n - i)).collect();
    let psihat: Vec<BigRational> = (0..n)
        .map(|j| {
            let sign = if (n - j) % 2 == 0 { 1 } else { -1 };
            term(n - j) * BigRational::from_integer(BigInt::from(sign))
        })
        .collect();
    // exact Gaussian elimination
    let mut rhs = phi;
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Singularity("kappa_numeric: singular GammaHat".into()))?;
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
            let sub = &factor * &rhs[col];
            rhs[r] -= sub;
        }
    }
    let mut acc = BigRational::zero();
    for i in 0..n {
        acc += &psihat[i] * (&rhs[i] / &a[i][i]);
    }
    acc.to_f64()
        .ok_or_else(|| Error::NumericalBreakdown("kappa_numeric overflow".into()))
}

/// `kappa_n = psihat_n^H (GammaHat_{n+1}^{2n})^{-1} phi_n`: 0 for even `n`,
/// 2 for odd `n`. The closed form is cross-checked against the defining
/// expression at several times.
pub fn kappa(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Spec("kappa needs n >= 1".into()));
    }
    if n > MAX_BLOCK {
        return Err(Error::Spec(format!("kappa limited to n <= {MAX_BLOCK}")));
    }
    let closed = if n % 2 == 0 { 0.0 } else { 2.0 };
    for t in [1.0, -1.0, 2.5, -2.5] {
        let value = kappa_numeric(n, t)?;
        if (value - closed).abs() > 1e-9 {
            return Err(Error::NumericalBreakdown(format!(
                "kappa({n}) numeric evaluation {value} disagrees with {closed} at t = {t}"
            )));
        }
    }
    Ok(closed)
}

/// Determinant of the reciprocal-factorial matrix with entries
/// `1/(k1 - i + j)!`: `(delta! (delta-1)! ... 1!) / (k2! (k2-1)! ... k1!)`
/// with `delta = k2 - k1`. Cross-checked against a dense determinant for
/// small sizes.
pub fn digamma_det(k1: usize, k2: usize) -> Result<f64> {
    if k1 == 0 || k2 < k1 || (k1 != k2 && k2 > 2 * k1) {
        return Err(Error::Spec(format!(
            "digamma_det needs 0 < k1 < k2 <= 2 k1 or k1 = k2, got ({k1}, {k2})"
        )));
    }
    if k2 > MAX_BLOCK {
        return Err(Error::Spec(format!("digamma_det limited to k2 <= {MAX_BLOCK}")));
    }
    let delta = k2 - k1;
    let mut value = 1.0f64;
    for j in 1..=delta {
        value *= factorial(j);
    }
    for j in k1..=k2 {
        value /= factorial(j);
    }
    if k1 <= 8 {
        let f = CMatrix::from_fn(delta + 1, delta + 1, |i, j| {
            let p = (k1 + j) as i32 - i as i32;
            Complex64::new(1.0 / factorial(p as usize), 0.0)
        });
        let det = f.determinant().re;
        if (det - value).abs() > 1e-12 * value.abs().max(1e-300) {
            return Err(Error::NumericalBreakdown(format!(
                "digamma_det({k1}, {k2}) dense determinant {det} disagrees with {value}"
            )));
        }
    }
    Ok(value)
}

/// Seeded random specification with at most three blocks of width at most
/// four, half dimension at most ten.
pub fn random_spec(seed: u64) -> JordanSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9).wrapping_add(7));
    let mut spec = JordanSpec::default();
    let n_blocks = rng.gen_range(1..=3usize);
    for _ in 0..n_blocks {
        let beta: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
        match rng.gen_range(0..4u8) {
            0 => spec.r.push(RBlock {
                lambda: Complex64::new(rng.gen_range(0.2..2.0), rng.gen_range(-2.0..2.0)),
                size: rng.gen_range(1..=4),
            }),
            1 => spec.e.push(EBlock {
                alpha: rng.gen_range(-3.0..3.0),
                beta,
                size: rng.gen_range(1..=4),
            }),
            2 => spec.c.push(CBlock {
                eta: rng.gen_range(-3.0..3.0),
                beta,
                m: rng.gen_range(0..=2),
                n: rng.gen_range(0..=1),
            }),
            _ => {
                let gamma: f64 = rng.gen_range(-3.0..3.0);
                let mut delta: f64 = rng.gen_range(-3.0..3.0);
                if (gamma - delta).abs() < 0.3 {
                    delta += 0.7;
                }
                spec.d.push(DBlock {
                    gamma,
                    delta,
                    beta,
                    s: rng.gen_range(0..=2),
                    t: rng.gen_range(0..=1),
                });
            }
        }
    }
    spec
}
