//! Complex generalized Schur (QZ) decomposition with eigenvalue reordering.
//!
//! `qz_decompose(a, b)` produces unitary `q`, `z` and upper triangular `s`,
//! `t` with `a = q s z^H` and `b = q t z^H`. Generalized eigenvalues are the
//! diagonal ratios `s_ii / t_ii`. Single-shift Moler-Stewart iteration; `b`
//! is assumed well conditioned (callers with singular pencil factors apply a
//! Moebius substitution first), so no infinite-eigenvalue deflation is done.

use super::{CMatrix, ONE, ZERO};
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct GeneralizedSchur {
    pub s: CMatrix,
    pub t: CMatrix,
    pub q: CMatrix,
    pub z: CMatrix,
}

impl GeneralizedSchur {
    /// Diagonal pairs `(alpha_i, beta_i)`; the generalized eigenvalues are
    /// `alpha_i / beta_i`.
    pub fn eigen_pairs(&self) -> Vec<(Complex64, Complex64)> {
        (0..self.s.nrows())
            .map(|i| (self.s[(i, i)], self.t[(i, i)]))
            .collect()
    }
}

/// Unitary 2x2 acting on a pair of rows, built to zero `g` in the column
/// vector `[f; g]`.
struct LeftRot {
    u11: Complex64,
    u12: Complex64,
}

impl LeftRot {
    fn zeroing(f: Complex64, g: Complex64) -> Option<LeftRot> {
        let d = (f.norm_sqr() + g.norm_sqr()).sqrt();
        if g.norm() == 0.0 || d == 0.0 {
            return None;
        }
        Some(LeftRot {
            u11: f.conj() / d,
            u12: g.conj() / d,
        })
    }

    // rows (p, q) <- [[u11, u12], [-conj(u12), conj(u11)]] * rows
    fn apply(&self, m: &mut CMatrix, p: usize, q: usize) {
        for j in 0..m.ncols() {
            let a = m[(p, j)];
            let b = m[(q, j)];
            m[(p, j)] = self.u11 * a + self.u12 * b;
            m[(q, j)] = -self.u12.conj() * a + self.u11.conj() * b;
        }
    }

    // accumulate: acc <- acc * U^H for left factor bookkeeping
    fn accumulate(&self, m: &mut CMatrix, p: usize, q: usize) {
        for i in 0..m.nrows() {
            let a = m[(i, p)];
            let b = m[(i, q)];
            m[(i, p)] = a * self.u11.conj() + b * self.u12.conj();
            m[(i, q)] = -a * self.u12 + b * self.u11;
        }
    }
}

/// Unitary 2x2 acting on a pair of columns, built either to zero the first
/// component of the row vector `[f, g]` (`zeroing_first`) or to map a given
/// vector onto the first column direction (`toward`).
struct RightRot {
    u11: Complex64,
    u21: Complex64,
}

impl RightRot {
    fn zeroing_first(f: Complex64, g: Complex64) -> Option<RightRot> {
        let d = (f.norm_sqr() + g.norm_sqr()).sqrt();
        if f.norm() == 0.0 || d == 0.0 {
            return None;
        }
        // columns of U: first = [-g; f]/d (annihilates), second = [conj(f); conj(g)]/d
        Some(RightRot {
            u11: -g / d,
            u21: f / d,
        })
    }

    /// First column of U is `[x1; x2] / |x|`.
    fn toward(x1: Complex64, x2: Complex64) -> Option<RightRot> {
        let d = (x1.norm_sqr() + x2.norm_sqr()).sqrt();
        if d == 0.0 {
            return None;
        }
        Some(RightRot {
            u11: x1 / d,
            u21: x2 / d,
        })
    }

    // cols (p, q) <- cols * [[u11, -conj(u21)], [u21, conj(u11)]]
    fn apply(&self, m: &mut CMatrix, p: usize, q: usize) {
        for i in 0..m.nrows() {
            let a = m[(i, p)];
            let b = m[(i, q)];
            m[(i, p)] = a * self.u11 + b * self.u21;
            m[(i, q)] = -a * self.u21.conj() + b * self.u11.conj();
        }
    }
}

/// Reduce `(s, t)` to Hessenberg-triangular form, accumulating into `q`, `z`.
fn hessenberg_triangular(gs: &mut GeneralizedSchur) {
    let n = gs.s.nrows();
    // t <- triangular via QR, folded into q
    let qr = gs.t.clone().qr();
    let qb = qr.q();
    gs.t = qr.r();
    gs.s = qb.adjoint() * &gs.s;
    gs.q = &gs.q * qb;
    for i in 1..n {
        for j in 0..i {
            gs.t[(i, j)] = ZERO;
        }
    }
    if n < 3 {
        return;
    }
    for j in 0..n - 2 {
        for i in (j + 2..n).rev() {
            if let Some(rot) = LeftRot::zeroing(gs.s[(i - 1, j)], gs.s[(i, j)]) {
                rot.apply(&mut gs.s, i - 1, i);
                rot.apply(&mut gs.t, i - 1, i);
                rot.accumulate(&mut gs.q, i - 1, i);
            }
            gs.s[(i, j)] = ZERO;
            if let Some(rot) = RightRot::zeroing_first(gs.t[(i, i - 1)], gs.t[(i, i)]) {
                rot.apply(&mut gs.s, i - 1, i);
                rot.apply(&mut gs.t, i - 1, i);
                rot.apply(&mut gs.z, i - 1, i);
            }
            gs.t[(i, i - 1)] = ZERO;
        }
    }
}

/// Shift: generalized eigenvalue of the trailing 2x2 pencil closest to the
/// bottom-corner ratio.
fn wilkinson_shift(s: &CMatrix, t: &CMatrix, hi: usize) -> Complex64 {
    let (a11, a12, a21, a22) = (
        s[(hi - 1, hi - 1)],
        s[(hi - 1, hi)],
        s[(hi, hi - 1)],
        s[(hi, hi)],
    );
    let (b11, b12, b22) = (t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi)]);
    let corner = if b22.norm() > 0.0 { a22 / b22 } else { a22 };
    // det(A - lambda B) = 0 with B upper triangular:
    // (a11 - l b11)(a22 - l b22) - (a12 - l b12) a21 = 0
    let c2 = b11 * b22;
    let c1 = -(a11 * b22 + a22 * b11 - a21 * b12);
    let c0 = a11 * a22 - a12 * a21;
    if c2.norm() == 0.0 {
        if c1.norm() == 0.0 {
            return corner;
        }
        return -c0 / c1;
    }
    let disc = (c1 * c1 - c2 * c0 * 4.0).sqrt();
    let r1 = (-c1 + disc) / (c2 * 2.0);
    let r2 = (-c1 - disc) / (c2 * 2.0);
    if (r1 - corner).norm() <= (r2 - corner).norm() {
        r1
    } else {
        r2
    }
}

fn sweep(gs: &mut GeneralizedSchur, lo: usize, hi: usize, shift: Complex64) {
    let mut f = gs.s[(lo, lo)] - shift * gs.t[(lo, lo)];
    let mut g = gs.s[(lo + 1, lo)];
    for k in lo..hi {
        if let Some(rot) = LeftRot::zeroing(f, g) {
            rot.apply(&mut gs.s, k, k + 1);
            rot.apply(&mut gs.t, k, k + 1);
            rot.accumulate(&mut gs.q, k, k + 1);
        }
        if k > lo {
            gs.s[(k + 1, k - 1)] = ZERO;
        }
        if let Some(rot) = RightRot::zeroing_first(gs.t[(k + 1, k)], gs.t[(k + 1, k + 1)]) {
            rot.apply(&mut gs.s, k, k + 1);
            rot.apply(&mut gs.t, k, k + 1);
            rot.apply(&mut gs.z, k, k + 1);
        }
        gs.t[(k + 1, k)] = ZERO;
        if k + 1 < hi {
            f = gs.s[(k + 1, k)];
            g = gs.s[(k + 2, k)];
        }
    }
}

/// QZ decomposition of a square complex pencil `(a, b)`.
pub fn qz_decompose(a: &CMatrix, b: &CMatrix) -> Result<GeneralizedSchur> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::Dimension("qz_decompose needs equal square matrices".into()));
    }
    let mut gs = GeneralizedSchur {
        s: a.clone(),
        t: b.clone(),
        q: CMatrix::identity(n, n),
        z: CMatrix::identity(n, n),
    };
    if n <= 1 {
        return Ok(gs);
    }
    hessenberg_triangular(&mut gs);

    let scale = gs.s.norm().max(gs.t.norm()).max(1.0);
    let eps = f64::EPSILON * scale;
    let mut hi = n - 1;
    let mut stall = 0usize;
    let max_iter = 60 * n;
    let mut iter = 0usize;
    while hi > 0 {
        iter += 1;
        if iter > max_iter {
            return Err(Error::NoConvergence("QZ iteration".into()));
        }
        // deflate negligible subdiagonals
        for i in 1..=hi {
            let bound = f64::EPSILON
                * (gs.s[(i - 1, i - 1)].norm() + gs.s[(i, i)].norm()).max(scale * 1e-2);
            if gs.s[(i, i - 1)].norm() <= bound {
                gs.s[(i, i - 1)] = ZERO;
            }
        }
        if gs.s[(hi, hi - 1)].norm() == 0.0 {
            hi -= 1;
            stall = 0;
            continue;
        }
        let mut lo = hi;
        while lo > 0 && gs.s[(lo, lo - 1)].norm() != 0.0 {
            lo -= 1;
        }
        stall += 1;
        let shift = if stall % 12 == 0 {
            // exceptional shift to break symmetric stalls
            Complex64::new(
                gs.s[(hi, hi - 1)].norm() + gs.s[(hi, hi)].norm(),
                0.731 * eps.max(1.0),
            )
        } else {
            wilkinson_shift(&gs.s, &gs.t, hi)
        };
        sweep(&mut gs, lo, hi, shift);
    }
    // scrub roundoff below the diagonal
    for i in 1..n {
        for j in 0..i {
            gs.s[(i, j)] = ZERO;
            gs.t[(i, j)] = ZERO;
        }
    }
    Ok(gs)
}

/// Swap the adjacent generalized eigenvalues at positions `k`, `k + 1`.
fn swap_adjacent(gs: &mut GeneralizedSchur, k: usize) {
    let (a11, a12, a22) = (gs.s[(k, k)], gs.s[(k, k + 1)], gs.s[(k + 1, k + 1)]);
    let (b11, b12, b22) = (gs.t[(k, k)], gs.t[(k, k + 1)], gs.t[(k + 1, k + 1)]);
    // eigenvector of the 2x2 subpencil for the trailing eigenvalue
    let p = b22 * a11 - a22 * b11;
    let r = b22 * a12 - a22 * b12;
    let scale = a11.norm() + a22.norm() + b11.norm() + b22.norm();
    if p.norm() <= f64::EPSILON * scale * scale {
        // identical eigenvalues: nothing to reorder
        return;
    }
    let rot_z = match RightRot::toward(-r, p) {
        Some(rot) => rot,
        None => return,
    };
    rot_z.apply(&mut gs.s, k, k + 1);
    rot_z.apply(&mut gs.t, k, k + 1);
    rot_z.apply(&mut gs.z, k, k + 1);
    // both first sub-columns are now parallel; rotate the longer one upright
    let (f, g) = if gs.s[(k, k)].norm_sqr() + gs.s[(k + 1, k)].norm_sqr()
        >= gs.t[(k, k)].norm_sqr() + gs.t[(k + 1, k)].norm_sqr()
    {
        (gs.s[(k, k)], gs.s[(k + 1, k)])
    } else {
        (gs.t[(k, k)], gs.t[(k + 1, k)])
    };
    if let Some(rot) = LeftRot::zeroing(f, g) {
        rot.apply(&mut gs.s, k, k + 1);
        rot.apply(&mut gs.t, k, k + 1);
        rot.accumulate(&mut gs.q, k, k + 1);
    }
    gs.s[(k + 1, k)] = ZERO;
    gs.t[(k + 1, k)] = ZERO;
}

/// Reorder the generalized Schur form so the selected eigenvalues occupy the
/// leading positions. Returns the number of selected eigenvalues.
pub fn qz_reorder(gs: &mut GeneralizedSchur, select: &[bool]) -> usize {
    let n = gs.s.nrows();
    assert_eq!(select.len(), n);
    let mut sel = select.to_vec();
    let mut target = 0;
    while target < n {
        let Some(j) = (target..n).find(|&j| sel[j]) else {
            break;
        };
        for k in (target..j).rev() {
            swap_adjacent(gs, k);
            sel.swap(k, k + 1);
        }
        target += 1;
    }
    target
}
