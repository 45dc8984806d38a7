// Scaling-and-squaring matrix exponential with diagonal Pade approximants
// (degrees 3, 5, 7, 9, 13), following Higham's 2005 selection thresholds.

use num_complex::Complex64 as C64;

use super::Mat3C;
use crate::math;
use crate::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA13: f64 = 5.371_920_351_148_152;

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
const B13: [f64; 14] = [
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

/// Largest 1-norm accepted; beyond it the entries of `exp` overflow `f64`.
const NORM_CAP: f64 = 700.0;

/// Matrix exponential of a 3x3 complex matrix.
pub fn expm(a: &Mat3C) -> Result<Mat3C> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let nrm = a.norm1();
    if nrm > NORM_CAP {
        return Err(Error::Overflow);
    }
    for &(m, theta) in THETA.iter() {
        if nrm <= theta {
            return pade_low(a, m);
        }
    }
    let mut s = 0_i32;
    if nrm > THETA13 {
        let (_, e) = math::frexp(nrm / THETA13);
        s = e.max(0);
    }
    let scaled = *a * (1.0 / f64::from(1u32 << s));
    let mut r = pade13(&scaled)?;
    for _ in 0..s {
        r = r * r;
    }
    Ok(r)
}

fn pade_low(a: &Mat3C, m: usize) -> Result<Mat3C> {
    let b: &[f64] = match m {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        _ => &B9,
    };
    let a2 = *a * *a;
    let mut pow = Mat3C::IDENTITY;
    let mut u = Mat3C::ZERO;
    let mut v = Mat3C::ZERO;
    let mut k = 0;
    while k <= m {
        v += pow * b[k];
        if k < m {
            u += pow * b[k + 1];
        }
        pow = pow * a2;
        k += 2;
    }
    let u = *a * u;
    finish(&u, &v)
}

fn pade13(a: &Mat3C) -> Result<Mat3C> {
    let b = &B13;
    let i = Mat3C::IDENTITY;
    let a2 = *a * *a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u_inner =
        a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]) + a6 * b[7] + a4 * b[5] + a2 * b[3] + i * b[1];
    let u = *a * u_inner;
    let v =
        a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] + a2 * b[2] + i * b[0];
    finish(&u, &v)
}

fn finish(u: &Mat3C, v: &Mat3C) -> Result<Mat3C> {
    let p = *v + *u;
    let q = *v - *u;
    q.solve(&p).ok_or(Error::Singular)
}

/// Exponential of `t * a` for a scalar `t`; convenience for path integration.
pub fn expm_scaled(a: &Mat3C, t: C64) -> Result<Mat3C> {
    expm(&(*a * t))
}
