//! Split-complex algebra and the quadric `C = {(x, chi) : <x, chi> = 1}`.
//!
//! A para-complex number is `re + i' im` with `i'^2 = +1`. Points of
//! `R^3 x R_3` correspond to para-complex 3-vectors via
//! `z = (x + chi)/2 + i' (x - chi)/2`, under which the standard
//! para-Hermitian form `<z, z>_h` equals the pairing `<x, chi>`.
//!
//! Vectors and covectors are both stored as `[f64; 3]`; every pairing is the
//! plain sum `x_1 chi_1 + x_2 chi_2 + x_3 chi_3`.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::grid::{self, Grid2, Order};
use crate::liealg::Signature;
use crate::math;
use crate::{Error, Result};

/// Split-complex scalar `re + i' im`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ParaComplex {
    pub re: f64,
    pub im: f64,
}

impl ParaComplex {
    pub const ZERO: ParaComplex = ParaComplex { re: 0.0, im: 0.0 };
    pub const ONE: ParaComplex = ParaComplex { re: 1.0, im: 0.0 };
    pub const I_PRIME: ParaComplex = ParaComplex { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        ParaComplex { re, im }
    }

    /// Para-complex conjugate `re - i' im`.
    pub fn conj(self) -> Self {
        ParaComplex::new(self.re, -self.im)
    }

    /// `z* z = re^2 - im^2`, the (indefinite) squared modulus.
    pub fn hnorm(self) -> f64 {
        self.re * self.re - self.im * self.im
    }

    /// Multiplicative inverse; zero divisors (`z* z = 0`) are an error.
    pub fn inv(self) -> Result<Self> {
        let n = self.hnorm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroDivisor);
        }
        Ok(ParaComplex::new(self.re / n, -self.im / n))
    }

    pub fn checked_div(self, w: ParaComplex) -> Result<Self> {
        Ok(self * w.inv()?)
    }

    pub fn scale(self, s: f64) -> Self {
        ParaComplex::new(self.re * s, self.im * s)
    }
}

impl Add for ParaComplex {
    type Output = ParaComplex;
    fn add(self, w: ParaComplex) -> ParaComplex {
        ParaComplex::new(self.re + w.re, self.im + w.im)
    }
}

impl Sub for ParaComplex {
    type Output = ParaComplex;
    fn sub(self, w: ParaComplex) -> ParaComplex {
        ParaComplex::new(self.re - w.re, self.im - w.im)
    }
}

impl Neg for ParaComplex {
    type Output = ParaComplex;
    fn neg(self) -> ParaComplex {
        ParaComplex::new(-self.re, -self.im)
    }
}

impl Mul for ParaComplex {
    type Output = ParaComplex;
    fn mul(self, w: ParaComplex) -> ParaComplex {
        pc_mul(self, w)
    }
}

/// `(a + i' b)(c + i' d) = (ac + bd) + i' (ad + bc)`.
pub fn pc_mul(z: ParaComplex, w: ParaComplex) -> ParaComplex {
    ParaComplex::new(z.re * w.re + z.im * w.im, z.re * w.im + z.im * w.re)
}

/// `exp(i' t) = cosh t + i' sinh t`.
pub fn pc_exp_ip(t: f64) -> ParaComplex {
    ParaComplex::new(math::cosh(t), math::sinh(t))
}

/// Para-complex 3-vector.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ParaVector3(pub [ParaComplex; 3]);

impl ParaVector3 {
    /// Standard form `<u, v>_h = sum conj(u_i) v_i`.
    pub fn pairing(&self, v: &ParaVector3) -> ParaComplex {
        let mut acc = ParaComplex::ZERO;
        for k in 0..3 {
            acc = acc + self.0[k].conj() * v.0[k];
        }
        acc
    }

    /// Twisted form `<u, v>_h = conj(u)^T P_H v`.
    pub fn pairing_twisted(&self, v: &ParaVector3, s: Signature) -> ParaComplex {
        let u = &self.0;
        let v = &v.0;
        u[0].conj() * v[1] + u[1].conj() * v[0] + (u[2].conj() * v[2]).scale(-s.h())
    }

    pub fn scale(&self, z: ParaComplex) -> ParaVector3 {
        ParaVector3([z * self.0[0], z * self.0[1], z * self.0[2]])
    }
}

/// `(x, chi) -> (x + chi)/2 + i' (x - chi)/2` componentwise.
pub fn real_pair_to_pc(x: &[f64; 3], chi: &[f64; 3]) -> ParaVector3 {
    let mut out = [ParaComplex::ZERO; 3];
    for k in 0..3 {
        out[k] = ParaComplex::new(0.5 * (x[k] + chi[k]), 0.5 * (x[k] - chi[k]));
    }
    ParaVector3(out)
}

/// Inverse of [`real_pair_to_pc`]: `x = re + im`, `chi = re - im`.
pub fn pc_to_real_pair(z: &ParaVector3) -> ([f64; 3], [f64; 3]) {
    let mut x = [0.0; 3];
    let mut chi = [0.0; 3];
    for k in 0..3 {
        x[k] = z.0[k].re + z.0[k].im;
        chi[k] = z.0[k].re - z.0[k].im;
    }
    (x, chi)
}

#[inline]
pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn axpy(a: f64, x: &[f64; 3], y: &[f64; 3]) -> [f64; 3] {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

#[inline]
fn scale3(a: f64, x: &[f64; 3]) -> [f64; 3] {
    [a * x[0], a * x[1], a * x[2]]
}

#[inline]
fn norm3(x: &[f64; 3]) -> f64 {
    math::sqrt(dot(x, x))
}

fn tol_scale(x: &[f64; 3], chi: &[f64; 3]) -> f64 {
    (norm3(x) * norm3(chi)).max(1.0)
}

/// Point of the quadric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointCM {
    pub x: [f64; 3],
    pub chi: [f64; 3],
}

impl PointCM {
    /// Validates `<x, chi> = 1` to `1e-12` (relative to `|x| |chi|`).
    pub fn new(x: [f64; 3], chi: [f64; 3]) -> Result<Self> {
        let r = (dot(&x, &chi) - 1.0).abs();
        if !(r <= 1e-12 * tol_scale(&x, &chi)) {
            return Err(Error::OffQuadric { residual: r });
        }
        Ok(PointCM { x, chi })
    }

    /// Rescale an arbitrary non-orthogonal pair onto the quadric.
    pub fn normalized(x: [f64; 3], chi: [f64; 3]) -> Result<Self> {
        let p = dot(&x, &chi);
        if p == 0.0 || !p.is_finite() {
            return Err(Error::OffQuadric { residual: 1.0 });
        }
        Ok(PointCM {
            x,
            chi: scale3(1.0 / p, &chi),
        })
    }

    /// Action of `g` (det 1) by `(g x, g^{-T} chi)`.
    pub fn act(&self, g: &[[f64; 3]; 3]) -> Result<PointCM> {
        let (gx, gc) = act_pair(g, &self.x, &self.chi)?;
        Ok(PointCM { x: gx, chi: gc })
    }

    /// Representative with `<x, x> = <chi, chi>`: scale by `(|chi| / |x|)^{1/2}`.
    pub fn s2n_normalized(&self) -> Result<PointCM> {
        let nx = norm3(&self.x);
        let nc = norm3(&self.chi);
        if nx == 0.0 || nc == 0.0 {
            return Err(Error::Vanishing);
        }
        let a = math::sqrt(nc / nx);
        Ok(PointCM {
            x: scale3(a, &self.x),
            chi: scale3(1.0 / a, &self.chi),
        })
    }

    /// The Reeb (vertical) direction `(x, -chi)`.
    pub fn vertical(&self) -> TangentCM {
        TangentCM {
            dx: self.x,
            dchi: scale3(-1.0, &self.chi),
            base: *self,
        }
    }
}

fn inverse_transpose(g: &[[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    // Cofactor matrix divided by the determinant equals g^{-T}.
    let mut cof = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
            cof[i][j] = g[i1][j1] * g[i2][j2] - g[i1][j2] * g[i2][j1];
        }
    }
    let det = g[0][0] * cof[0][0] + g[0][1] * cof[0][1] + g[0][2] * cof[0][2];
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Singular);
    }
    for row in cof.iter_mut() {
        for v in row.iter_mut() {
            *v /= det;
        }
    }
    Ok(cof)
}

fn matvec(g: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [dot(&g[0], v), dot(&g[1], v), dot(&g[2], v)]
}

fn act_pair(g: &[[f64; 3]; 3], x: &[f64; 3], chi: &[f64; 3]) -> Result<([f64; 3], [f64; 3])> {
    let git = inverse_transpose(g)?;
    Ok((matvec(g, x), matvec(&git, chi)))
}

/// Tangent vector `(X, Xt)` to the quadric at `base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentCM {
    /// Vector component `X`.
    pub dx: [f64; 3],
    /// Covector component `Xt`.
    pub dchi: [f64; 3],
    pub base: PointCM,
}

impl TangentCM {
    /// Validates `<X, chi> + <x, Xt> = 0` to `1e-10` (relative).
    pub fn new(dx: [f64; 3], dchi: [f64; 3], base: PointCM) -> Result<Self> {
        let r = (dot(&dx, &base.chi) + dot(&base.x, &dchi)).abs();
        let scale = (norm3(&dx) * norm3(&base.chi))
            .max(norm3(&base.x) * norm3(&dchi))
            .max(1.0);
        if !(r <= 1e-10 * scale) {
            return Err(Error::NotTangent { residual: r });
        }
        Ok(TangentCM { dx, dchi, base })
    }

    /// Projects an arbitrary pair onto the tangent space by removing the
    /// normal component along `(x, chi)` direction of the constraint gradient.
    pub fn project(dx: [f64; 3], dchi: [f64; 3], base: PointCM) -> Self {
        let r = dot(&dx, &base.chi) + dot(&base.x, &dchi);
        let n2 = dot(&base.chi, &base.chi) + dot(&base.x, &base.x);
        let t = r / n2;
        TangentCM {
            dx: axpy(-t, &base.chi, &dx),
            dchi: axpy(-t, &base.x, &dchi),
            base,
        }
    }

    pub fn add(&self, w: &TangentCM) -> TangentCM {
        TangentCM {
            dx: axpy(1.0, &w.dx, &self.dx),
            dchi: axpy(1.0, &w.dchi, &self.dchi),
            base: self.base,
        }
    }

    pub fn scale(&self, a: f64) -> TangentCM {
        TangentCM {
            dx: scale3(a, &self.dx),
            dchi: scale3(a, &self.dchi),
            base: self.base,
        }
    }

    /// Push forward under `g` (det 1).
    pub fn act(&self, g: &[[f64; 3]; 3]) -> Result<TangentCM> {
        let base = self.base.act(g)?;
        let (dx, dchi) = act_pair(g, &self.dx, &self.dchi)?;
        Ok(TangentCM { dx, dchi, base })
    }

    /// The split-complex structure `(X, Xt) -> (X, -Xt)`.
    pub fn i_prime(&self) -> TangentCM {
        TangentCM {
            dx: self.dx,
            dchi: scale3(-1.0, &self.dchi),
            base: self.base,
        }
    }
}

/// Splits `v` into horizontal `+1`, vertical and horizontal `-1` parts:
/// `(X - <X,chi> x, 0)`, `<X,chi> (x, -chi)`, `(0, Xt - <x,Xt> chi)`.
pub fn decompose_tangent(v: &TangentCM) -> Result<(TangentCM, TangentCM, TangentCM)> {
    let b = &v.base;
    TangentCM::new(v.dx, v.dchi, *b)?;
    let a = dot(&v.dx, &b.chi);
    let c = dot(&b.x, &v.dchi);
    let plus = TangentCM {
        dx: axpy(-a, &b.x, &v.dx),
        dchi: [0.0; 3],
        base: *b,
    };
    let vert = TangentCM {
        dx: scale3(a, &b.x),
        dchi: scale3(-a, &b.chi),
        base: *b,
    };
    let minus = TangentCM {
        dx: [0.0; 3],
        dchi: axpy(-c, &b.chi, &v.dchi),
        base: *b,
    };
    Ok((plus, vert, minus))
}

fn same_base(v: &TangentCM, w: &TangentCM) -> Result<()> {
    if v.base != w.base {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

/// `ghat(v, w) = (<X, Yt> + <Y, Xt>) / 2`.
pub fn ghat(v: &TangentCM, w: &TangentCM) -> Result<f64> {
    same_base(v, w)?;
    Ok(0.5 * (dot(&v.dx, &w.dchi) + dot(&w.dx, &v.dchi)))
}

/// `omegahat(v, w) = (<X, Yt> - <Y, Xt>) / 2`.
pub fn omegahat(v: &TangentCM, w: &TangentCM) -> Result<f64> {
    same_base(v, w)?;
    Ok(0.5 * (dot(&v.dx, &w.dchi) - dot(&w.dx, &v.dchi)))
}

/// Contact form `zeta(v) = Im <z, v>_h` in the standard form.
pub fn contact(v: &TangentCM) -> f64 {
    let z = real_pair_to_pc(&v.base.x, &v.base.chi);
    let w = real_pair_to_pc(&v.dx, &v.dchi);
    z.pairing(&w).im
}

/// Gridded lift `(x, chi)` of a surface.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftSamples {
    pub grid: Grid2,
    pub x: Vec<[f64; 3]>,
    pub chi: Vec<[f64; 3]>,
}

impl LiftSamples {
    pub fn new(grid: Grid2, x: Vec<[f64; 3]>, chi: Vec<[f64; 3]>) -> Result<Self> {
        grid.check_len(x.len())?;
        grid.check_len(chi.len())?;
        Ok(LiftSamples { grid, x, chi })
    }

    /// Largest `|<x, chi> - 1|`.
    pub fn quadric_residual(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.chi)
            .map(|(x, c)| (dot(x, c) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Copy normalized so that `<x, x> = <chi, chi>` pointwise.
    pub fn s2n_normalized(&self) -> Result<LiftSamples> {
        let mut out = self.clone();
        for k in 0..self.x.len() {
            let p = PointCM {
                x: self.x[k],
                chi: self.chi[k],
            }
            .s2n_normalized()?;
            out.x[k] = p.x;
            out.chi[k] = p.chi;
        }
        Ok(out)
    }
}

/// `(x, chi) -> (alpha x, chi / alpha)` pointwise.
pub fn scale_lift(f: &LiftSamples, alpha: &[f64]) -> Result<LiftSamples> {
    f.grid.check_len(alpha.len())?;
    let mut out = f.clone();
    for (k, &a) in alpha.iter().enumerate() {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Vanishing);
        }
        out.x[k] = scale3(a, &f.x[k]);
        out.chi[k] = scale3(1.0 / a, &f.chi[k]);
    }
    Ok(out)
}

fn vec_partial(f: &[[f64; 3]], g: &Grid2, axis: usize, order: Order) -> Result<Vec<[f64; 3]>> {
    let mut out = alloc::vec![[0.0; 3]; f.len()];
    for c in 0..3 {
        let comp: Vec<f64> = f.iter().map(|v| v[c]).collect();
        let d = grid::partial(&comp, g, axis, order)?;
        for (o, v) in out.iter_mut().zip(d) {
            o[c] = v;
        }
    }
    Ok(out)
}

/// Derivatives `(d1 x, d2 x, d1 chi, d2 chi)` of a lift.
pub fn lift_derivatives(f: &LiftSamples, order: Order) -> Result<[Vec<[f64; 3]>; 4]> {
    Ok([
        vec_partial(&f.x, &f.grid, 0, order)?,
        vec_partial(&f.x, &f.grid, 1, order)?,
        vec_partial(&f.chi, &f.grid, 0, order)?,
        vec_partial(&f.chi, &f.grid, 1, order)?,
    ])
}

/// Vertical form `psi_a = <d_a x, chi>` at every grid point.
pub fn psi(f: &LiftSamples, order: Order) -> Result<Vec<[f64; 2]>> {
    let d = lift_derivatives(f, order)?;
    Ok((0..f.x.len())
        .map(|k| [dot(&d[0][k], &f.chi[k]), dot(&d[1][k], &f.chi[k])])
        .collect())
}

/// Horizontal forms of a lift at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftForms {
    /// `xi = (xi_1 - i xi_2)/2` with `xi_a = d_a x - psi_a x`.
    pub xi: [C64; 3],
    /// `eta = (eta_1 - i eta_2)/2` with `eta_a = d_a chi + psi_a chi`.
    pub eta: [C64; 3],
    pub psi: [f64; 2],
    /// `rho = (psi_1 - i psi_2)/2`.
    pub rho: C64,
}

/// Horizontal forms at every grid point.
pub fn lift_forms(f: &LiftSamples, order: Order) -> Result<Vec<LiftForms>> {
    let d = lift_derivatives(f, order)?;
    let mut out = Vec::with_capacity(f.x.len());
    for k in 0..f.x.len() {
        let x = &f.x[k];
        let chi = &f.chi[k];
        let p1 = dot(&d[0][k], chi);
        let p2 = dot(&d[1][k], chi);
        let xi1 = axpy(-p1, x, &d[0][k]);
        let xi2 = axpy(-p2, x, &d[1][k]);
        let eta1 = axpy(p1, chi, &d[2][k]);
        let eta2 = axpy(p2, chi, &d[3][k]);
        let mut xi = [C64::new(0.0, 0.0); 3];
        let mut eta = [C64::new(0.0, 0.0); 3];
        for c in 0..3 {
            xi[c] = C64::new(xi1[c], -xi2[c]) * 0.5;
            eta[c] = C64::new(eta1[c], -eta2[c]) * 0.5;
        }
        out.push(LiftForms {
            xi,
            eta,
            psi: [p1, p2],
            rho: C64::new(p1, -p2) * 0.5,
        });
    }
    Ok(out)
}

/// Largest `|psi_a|` over the grid; zero exactly for horizontal lifts.
pub fn horizontality_residual(f: &LiftSamples) -> Result<f64> {
    f.grid.require(3)?;
    let p = psi(f, Order::Second)?;
    Ok(p.iter()
        .map(|v| v[0].abs().max(v[1].abs()))
        .fold(0.0, f64::max))
}

/// Largest `|dpsi + 2 omegahat|` over plaquettes (cell-centre evaluation).
pub fn dpsi_vs_omega_residual(f: &LiftSamples) -> Result<f64> {
    let g = &f.grid;
    g.require(3)?;
    let p = psi(f, Order::Second)?;
    let mut worst = 0.0_f64;
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let k00 = g.idx(i, j);
            let k10 = g.idx(i + 1, j);
            let k01 = g.idx(i, j + 1);
            let k11 = g.idx(i + 1, j + 1);
            let d1psi2 = (p[k10][1] + p[k11][1] - p[k00][1] - p[k01][1]) / (2.0 * g.hx);
            let d2psi1 = (p[k01][0] + p[k11][0] - p[k00][0] - p[k10][0]) / (2.0 * g.hy);
            let dpsi = d1psi2 - d2psi1;
            let cell = |v: &[[f64; 3]], axis: usize| -> [f64; 3] {
                let mut out = [0.0; 3];
                for c in 0..3 {
                    out[c] = if axis == 0 {
                        (v[k10][c] + v[k11][c] - v[k00][c] - v[k01][c]) / (2.0 * g.hx)
                    } else {
                        (v[k01][c] + v[k11][c] - v[k00][c] - v[k10][c]) / (2.0 * g.hy)
                    };
                }
                out
            };
            let x1 = cell(&f.x, 0);
            let x2 = cell(&f.x, 1);
            let c1 = cell(&f.chi, 0);
            let c2 = cell(&f.chi, 1);
            let omega = 0.5 * (dot(&x1, &c2) - dot(&x2, &c1));
            worst = worst.max((dpsi + 2.0 * omega).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_divisor_has_no_inverse() {
        assert_eq!(ParaComplex::new(1.0, 1.0).inv(), Err(Error::ZeroDivisor));
        let z = ParaComplex::new(2.0, 1.0);
        let w = z.inv().unwrap();
        assert_eq!(z * w, ParaComplex::ONE);
    }

    #[test]
    fn vertical_vector_decomposes_to_itself() {
        let p = PointCM::new([1.0, 2.0, 0.0], [1.0, 0.0, 5.0]).unwrap();
        let v = p.vertical();
        let (a, b, c) = decompose_tangent(&v).unwrap();
        assert_eq!(a.dx, [0.0; 3]);
        assert_eq!(a.dchi, [0.0; 3]);
        assert_eq!(c.dx, [0.0; 3]);
        assert_eq!(c.dchi, [0.0; 3]);
        assert_eq!(b, v);
    }

    #[test]
    fn off_quadric_rejected() {
        assert!(matches!(
            PointCM::new([1.0, 0.0, 0.0], [2.0, 0.0, 0.0]),
            Err(Error::OffQuadric { .. })
        ));
    }
}
