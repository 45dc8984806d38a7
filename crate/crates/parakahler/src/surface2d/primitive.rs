// Primitive-harmonicity certificates relative to sigma_H^(6/k) and the
// associated lambda-family of Maurer-Cartan pairs.

use num_complex::Complex64 as C64;

use super::{curvature, McPair};
use crate::grid::Order;
use crate::liealg::decompose;
use crate::{Error, Result};

/// `1, i, e^{i pi/6}, -1`.
pub const LAMBDA_SAMPLES: [C64; 4] = [
    C64 { re: 1.0, im: 0.0 },
    C64 { re: 0.0, im: 1.0 },
    C64 {
        re: 0.866_025_403_784_438_6,
        im: 0.5,
    },
    C64 { re: -1.0, im: 0.0 },
];

/// Outcome of a primitivity test.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub k: usize,
    pub tol: f64,
    /// Largest norm of the parts of `Uz` outside grades `{-1, 0}` plus those of
    /// `Uzb` outside `{0, 1}`; for `k = 2` the largest lambda-flatness residual.
    pub residual: f64,
    pub pass: bool,
    /// Largest norm of the `g_j` part of the trace-free `Uz` / `Uzb`, `j = 0..6`.
    pub norms_z: [f64; 6],
    pub norms_zb: [f64; 6],
    /// Largest `|tr Uz| + |tr Uzb|` removed before grading.
    pub trace_removed: f64,
}

fn check_k(k: usize) -> Result<()> {
    if matches!(k, 2 | 3 | 6) {
        Ok(())
    } else {
        Err(Error::InvalidParameter("order k must be 6, 3 or 2"))
    }
}

/// Certifies that `Uz` lies in `g_{-1} + g_0` and `Uzb` in `g_0 + g_1` for the
/// grading of `sigma_H^(6/k)`, after removing the scalar (trace) part.
pub fn primitive_check(mc: &McPair, k: usize, tol: f64) -> Result<Certificate> {
    check_k(k)?;
    let s = mc.sig;
    let n = mc.grid.len();
    let mut norms_z = [0.0_f64; 6];
    let mut norms_zb = [0.0_f64; 6];
    let mut trace_removed = 0.0_f64;
    let mut residual = 0.0_f64;
    for p in 0..n {
        let (a, b) = (mc.uz[p], mc.uzb[p]);
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite);
        }
        trace_removed = trace_removed.max(a.trace().norm() + b.trace().norm());
        let da = decompose(&a.trace_free(), s);
        let db = decompose(&b.trace_free(), s);
        for j in 0..6 {
            norms_z[j] = norms_z[j].max(da.parts[j].norm());
            norms_zb[j] = norms_zb[j].max(db.parts[j].norm());
        }
        if k != 2 {
            let ra = da.sum() - da.graded(k, -1) - da.graded(k, 0);
            let rb = db.sum() - db.graded(k, 0) - db.graded(k, 1);
            residual = residual.max(ra.norm() + rb.norm());
        }
    }
    if k == 2 {
        residual = lambda_flatness(mc, &LAMBDA_SAMPLES, 2)?;
    }
    Ok(Certificate {
        k,
        tol,
        residual,
        pass: residual < tol,
        norms_z,
        norms_zb,
        trace_removed,
    })
}

/// Replaces the grade `-1` part `a` of `Uz` by `a / lambda` and the grade `1`
/// part `b` of `Uzb` by `lambda b`, without checking primitivity.
pub fn lambda_deform_unchecked(mc: &McPair, lambda: C64, k: usize) -> Result<McPair> {
    check_k(k)?;
    if !(lambda.norm() > 0.0) || !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::InvalidParameter(
            "lambda must be a finite non-zero complex number",
        ));
    }
    let s = mc.sig;
    let li = lambda.inv() - 1.0;
    let l = lambda - 1.0;
    let uz = crate::par::map(mc.grid.len(), |p| {
        let a = mc.uz[p];
        let d = decompose(&a.trace_free(), s);
        a + d.graded(k, -1) * li
    });
    let uzb = crate::par::map(mc.grid.len(), |p| {
        let b = mc.uzb[p];
        let d = decompose(&b.trace_free(), s);
        b + d.graded(k, 1) * l
    });
    Ok(McPair {
        sig: s,
        grid: mc.grid,
        uz,
        uzb,
        pre: None,
    })
}

/// [`lambda_deform_unchecked`] after a primitivity check at tolerance `tol`
/// (orders 6 and 3; order 2 grades every pair).
pub fn lambda_deform(mc: &McPair, lambda: C64, k: usize, tol: f64) -> Result<McPair> {
    check_k(k)?;
    if k != 2 {
        let cert = primitive_check(mc, k, tol)?;
        if !cert.pass {
            return Err(Error::NotPrimitive {
                residual: cert.residual,
            });
        }
    }
    lambda_deform_unchecked(mc, lambda, k)
}

/// Largest interior zero-curvature residual of the deformed pair over `lambdas`.
pub fn lambda_flatness(mc: &McPair, lambdas: &[C64], k: usize) -> Result<f64> {
    let g = mc.grid;
    let mut worst = 0.0_f64;
    for &l in lambdas {
        let d = lambda_deform_unchecked(mc, l, k)?;
        let curv = curvature(&d, Order::Second)?;
        let m = crate::par::max_of(g.len(), |p| {
            let (i, j) = g.ij(p);
            if g.is_interior(i, j) {
                curv[p].norm()
            } else {
                0.0
            }
        });
        worst = worst.max(m);
    }
    Ok(worst)
}
