//! Matrix exponential by scaling and squaring with diagonal Pade approximants.
//!
//! Degrees and norm bounds follow Higham, "The Scaling and Squaring Method
//! for the Matrix Exponential Revisited" (2005).

use super::{check_square, identity, re, solve, CMatrix};
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_uv(a: &CMatrix, coeffs: &[f64]) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let a2 = a * a;
    // Even powers of a, built on demand: a^0, a^2, a^4, ...
    let mut evens = vec![identity(n), a2];
    while evens.len() < coeffs.len() / 2 {
        let next = evens.last().unwrap() * &evens[1];
        evens.push(next);
    }
    let mut u_inner = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    for (k, &c) in coeffs.iter().enumerate() {
        if k % 2 == 1 {
            u_inner += evens[k / 2].scale(c);
        } else {
            v += evens[k / 2].scale(c);
        }
    }
    (a * u_inner, v)
}

fn pade13_uv(a: &CMatrix) -> (CMatrix, CMatrix) {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    let eye = identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_high = &a6 * (a6.scale(B[13]) + a4.scale(B[11]) + a2.scale(B[9]));
    let u_low = a6.scale(B[7]) + a4.scale(B[5]) + a2.scale(B[3]) + eye.scale(B[1]);
    let u = a * (u_high + u_low);
    let v_high = &a6 * (a6.scale(B[12]) + a4.scale(B[10]) + a2.scale(B[8]));
    let v = v_high + a6.scale(B[6]) + a4.scale(B[4]) + a2.scale(B[2]) + eye.scale(B[0]);
    (u, v)
}

/// `e^A` for a square complex matrix.
pub fn mat_exp(a: &CMatrix) -> Result<CMatrix> {
    check_square(a, "mat_exp input")?;
    let n = a.nrows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Overflow { norm });
    }

    const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
    const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
    const B7: [f64; 8] = [
        17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
    ];
    const B9: [f64; 10] = [
        17643225600.0,
        8821612800.0,
        2075673600.0,
        302702400.0,
        30270240.0,
        2162160.0,
        110880.0,
        3960.0,
        90.0,
        1.0,
    ];

    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_uv(a, &B3);
        (u, v, 0u32)
    } else if norm <= THETA_5 {
        let (u, v) = pade_uv(a, &B5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) = pade_uv(a, &B7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = pade_uv(a, &B9);
        (u, v, 0)
    } else {
        let s = ((norm / THETA_13).log2().ceil() as i32).max(0) as u32;
        if s > 200 {
            return Err(Error::Overflow { norm });
        }
        let scaled = a.map(|x| x * re(0.5f64.powi(s as i32)));
        let (u, v) = pade13_uv(&scaled);
        (u, v, s)
    };

    // Pade approximant is (V + U)(V - U)^{-1}.
    let mut result = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if result.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Overflow { norm });
    }
    Ok(result)
}
