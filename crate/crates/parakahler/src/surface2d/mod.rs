//! Definite surfaces in `DP^2` in a complex coordinate `z = y1 + i y2`.
//!
//! A surface is described by the signature `H`, the conformal factor `u`,
//! the para-Kaehler angle `theta` (through `c = 1 + i tan(theta - pi/2)`),
//! the mean-curvature form `phi`, the cubic differential `Q` and the lift
//! form `rho`. From these the module builds the Maurer-Cartan pair
//! `(Uz, Uzb)` of the gauged frame, evaluates the compatibility equations,
//! solves the Tzitzeica equation and the `dbar`-problem for `rho`, and
//! certifies primitive harmonicity of the frame.

mod primitive;
mod solver;

pub use primitive::{
    lambda_deform, lambda_deform_unchecked, lambda_flatness, primitive_check, Certificate,
    LAMBDA_SAMPLES,
};
pub use solver::{
    cauchy_transform, normalize_det, solve_rho, solve_tzitzeica, NewtonOptions, NewtonReport,
    RhoSolution, RHO_CAP,
};

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64 as C64;

use crate::frames::{GridN, ImmersionDataN};
use crate::grid::{dz_dzb, dz_dzb_mat, dz_dzb_real, Grid2, Order};
use crate::liealg::{Mat3C, Signature};
use crate::math;
use crate::{Error, Result};

/// Default distance kept between `theta` and the ends of `(0, pi)`.
pub const THETA_MIN: f64 = 0.05;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Specialization of the surface equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    General,
    Lagrangian,
    Minimal,
    MinLag,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::General => "general",
            Kind::Lagrangian => "lagrangian",
            Kind::Minimal => "minimal",
            Kind::MinLag => "minlag",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Kind::General),
            "lagrangian" => Ok(Kind::Lagrangian),
            "minimal" => Ok(Kind::Minimal),
            "minlag" => Ok(Kind::MinLag),
            _ => Err(Error::InvalidParameter(
                "kind must be general, lagrangian, minimal or minlag",
            )),
        }
    }
}

/// `c = 1 + i tan(theta - pi/2)`, rejecting angles within `theta_min` of `0` or `pi`.
pub fn c_from_theta(theta: f64, theta_min: f64) -> Result<C64> {
    if !theta.is_finite() || theta <= theta_min || theta >= core::f64::consts::PI - theta_min {
        return Err(Error::GuardBand { theta });
    }
    Ok(C64::new(1.0, math::tan(theta - FRAC_PI_2)))
}

/// Inverse of [`c_from_theta`] for `Re c > 0`: `theta = atan(Im c / Re c) + pi/2`.
pub fn theta_from_c(c: C64) -> f64 {
    math::atan(c.im / c.re) + FRAC_PI_2
}

/// Off-diagonal entry `b` of the real form `h = [[a, b], [-b, a]]`, with `a = 2 H e^u`.
pub fn b_from_theta(theta: f64, u: f64, sig: Signature) -> f64 {
    2.0 * sig.h() * math::exp(u) * math::tan(theta - FRAC_PI_2)
}

/// Surface fields sampled on a rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceData {
    pub sig: Signature,
    pub grid: Grid2,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<C64>,
    pub q: Vec<C64>,
    pub rho: Vec<C64>,
    pub theta_min: f64,
}

impl SurfaceData {
    pub fn new(
        sig: Signature,
        grid: Grid2,
        u: Vec<f64>,
        theta: Vec<f64>,
        phi: Vec<C64>,
        q: Vec<C64>,
        rho: Vec<C64>,
    ) -> Result<Self> {
        let d = SurfaceData {
            sig,
            grid,
            u,
            theta,
            phi,
            q,
            rho,
            theta_min: THETA_MIN,
        };
        d.validate()?;
        Ok(d)
    }

    /// Minimal Lagrangian data: `theta = pi/2`, `phi = 0`, `rho = 0`.
    pub fn minlag(sig: Signature, grid: Grid2, u: Vec<f64>, q: Vec<C64>) -> Result<Self> {
        let n = grid.len();
        let zero = alloc::vec![C64::new(0.0, 0.0); n];
        SurfaceData::new(
            sig,
            grid,
            u,
            alloc::vec![FRAC_PI_2; n],
            zero.clone(),
            q,
            zero,
        )
    }

    /// Replaces the guard band and revalidates.
    pub fn with_theta_min(mut self, theta_min: f64) -> Result<Self> {
        if !(0.0..FRAC_PI_2).contains(&theta_min) {
            return Err(Error::InvalidParameter("theta_min must lie in [0, pi/2)"));
        }
        self.theta_min = theta_min;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        for len in [
            self.u.len(),
            self.theta.len(),
            self.phi.len(),
            self.q.len(),
            self.rho.len(),
        ] {
            self.grid.check_len(len)?;
        }
        if self.u.iter().any(|v| !v.is_finite())
            || self
                .phi
                .iter()
                .chain(&self.q)
                .chain(&self.rho)
                .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite);
        }
        for &t in &self.theta {
            c_from_theta(t, self.theta_min)?;
        }
        Ok(())
    }

    /// Copy with the fields forced by `kind` (`theta = pi/2` for Lagrangian,
    /// `phi = 0` for minimal, both and `rho = 0` for minimal Lagrangian).
    pub fn specialize(&self, kind: Kind) -> SurfaceData {
        let mut d = self.clone();
        let zero = C64::new(0.0, 0.0);
        if matches!(kind, Kind::Lagrangian | Kind::MinLag) {
            d.theta.iter_mut().for_each(|t| *t = FRAC_PI_2);
        }
        if matches!(kind, Kind::Minimal | Kind::MinLag) {
            d.phi.iter_mut().for_each(|p| *p = zero);
        }
        if kind == Kind::MinLag {
            d.rho.iter_mut().for_each(|r| *r = zero);
        }
        d
    }

    /// The field `c`. Exactly `1` where `theta = pi/2`.
    pub fn c(&self) -> Vec<C64> {
        self.theta
            .iter()
            .map(|&t| C64::new(1.0, math::tan(t - FRAC_PI_2)))
            .collect()
    }
}

/// Maurer-Cartan pair of the gauged frame, optionally with the pre-gauge pair.
#[derive(Clone, Debug, PartialEq)]
pub struct McPair {
    pub sig: Signature,
    pub grid: Grid2,
    pub uz: Vec<Mat3C>,
    pub uzb: Vec<Mat3C>,
    pub pre: Option<(Vec<Mat3C>, Vec<Mat3C>)>,
}

impl McPair {
    /// Same pair of matrices at every grid point.
    pub fn constant(sig: Signature, grid: Grid2, uz: Mat3C, uzb: Mat3C) -> Self {
        let n = grid.len();
        McPair {
            sig,
            grid,
            uz: alloc::vec![uz; n],
            uzb: alloc::vec![uzb; n],
            pre: None,
        }
    }
}

/// Gauged pair `(Uz, Uzb)` for `kind`, derivatives by second-order differences.
pub fn build_mc(data: &SurfaceData, kind: Kind) -> Result<McPair> {
    build_mc_with(data, kind, Order::Second, false)
}

/// As [`build_mc`] with a choice of stencil and optionally the pre-gauge pair.
pub fn build_mc_with(
    data: &SurfaceData,
    kind: Kind,
    order: Order,
    with_pre: bool,
) -> Result<McPair> {
    data.validate()?;
    let d = data.specialize(kind);
    let g = d.grid;
    let h = d.sig.h();
    let c = d.c();
    if c.iter().any(|c| c.re <= 0.0) {
        return Err(Error::BranchCut);
    }
    // L = u + log c; its z-derivative enters both diagonal entries.
    let l: Vec<C64> = c.iter().zip(&d.u).map(|(c, u)| c.ln() + *u).collect();
    let (dl, dbl) = dz_dzb(&l, &g, order)?;
    let (du, dbu) = dz_dzb_real(&d.u, &g, order)?;
    let n = g.len();
    let mut uz = Vec::with_capacity(n);
    let mut uzb = Vec::with_capacity(n);
    let mut pre = if with_pre {
        Some((Vec::with_capacity(n), Vec::with_capacity(n)))
    } else {
        None
    };
    for k in 0..n {
        let ck = c[k];
        let cb = ck.conj();
        let ac = ck.norm();
        let eu = math::exp(d.u[k]);
        let ehu = math::exp(0.5 * d.u[k]);
        let phi = d.phi[k];
        let q = d.q[k];
        let rho = d.rho[k];
        let sc = I * d.sig.sqrt_h_times(ck) * ehu;
        let scb = I * d.sig.sqrt_h_times(cb) * ehu;
        // d log c = dL - du, d log cbar = conj(dbar log c)
        let dlogc = dl[k] - du[k];
        let dblogc = dbl[k] - dbu[k];
        let dlogcb = dblogc.conj();
        let dblogcb = dlogc.conj();
        let z0 = C64::new(0.0, 0.0);
        let a = Mat3C::from_rows([
            [rho + (du[k] + dlogc) * 0.5 + phi / ck, phi.conj() / ac, sc],
            [
                q * (h / eu / ac),
                rho - (du[k] + dlogcb) * 0.5 + phi / cb,
                z0,
            ],
            [z0, scb, rho],
        ]);
        let b = Mat3C::from_rows([
            [
                rho.conj() - (dbu[k] + dblogc) * 0.5 + phi.conj() / ck,
                q.conj() * (h / eu / ac),
                z0,
            ],
            [
                phi / ac,
                rho.conj() + (dbu[k] + dblogcb) * 0.5 + phi.conj() / cb,
                scb,
            ],
            [sc, z0, rho.conj()],
        ]);
        uz.push(a);
        uzb.push(b);
        if let Some((pz, pzb)) = pre.as_mut() {
            let one = C64::new(1.0, 0.0);
            pz.push(Mat3C::from_rows([
                [rho + phi / ck + dl[k], phi.conj() / ck, one],
                [q * (h / eu) / cb, rho + phi / cb, z0],
                [z0, -cb * (h * eu), rho],
            ]));
            pzb.push(Mat3C::from_rows([
                [rho.conj() + phi.conj() / ck, q.conj() * (h / eu) / ck, z0],
                [phi / cb, rho.conj() + phi.conj() / cb + dl[k].conj(), one],
                [-ck * (h * eu), z0, rho.conj()],
            ]));
        }
    }
    Ok(McPair {
        sig: d.sig,
        grid: g,
        uz,
        uzb,
        pre,
    })
}

/// Gauge `D = diag((Hc)^{-1/2} e^{-u/2}, (H cbar)^{-1/2} e^{-u/2}, i)` at one point.
pub fn gauge(sig: Signature, u: f64, c: C64) -> Mat3C {
    let e = math::exp(-0.5 * u);
    Mat3C::diag(
        sig.sqrt_h_times(c).inv() * e,
        sig.sqrt_h_times(c.conj()).inv() * e,
        I,
    )
}

/// Curvature `dz Uzb - dzb Uz + [Uz, Uzb]` at every point.
pub fn curvature(mc: &McPair, order: Order) -> Result<Vec<Mat3C>> {
    let (_, dbz) = dz_dzb_mat(&mc.uz, &mc.grid, order)?;
    let (dzb, _) = dz_dzb_mat(&mc.uzb, &mc.grid, order)?;
    Ok(crate::par::map(mc.grid.len(), |k| {
        dzb[k] - dbz[k] + mc.uz[k].bracket(&mc.uzb[k])
    }))
}

/// Named max-abs residuals over the interior.
#[derive(Clone, Debug, PartialEq)]
pub struct Residuals {
    pub kind: Kind,
    pub entries: Vec<(&'static str, f64)>,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.entries.iter().fold(
            0.0_f64,
            |m, (_, v)| if v.is_nan() { f64::INFINITY } else { m.max(*v) },
        )
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
    }
}

/// Pointwise residual fields of the compatibility equations.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualFields {
    pub kind: Kind,
    pub fields: Vec<(&'static str, Vec<C64>)>,
}

fn interior_max(g: &Grid2, f: &[C64]) -> f64 {
    crate::par::max_of(g.len(), |k| {
        let (i, j) = g.ij(k);
        if g.is_interior(i, j) {
            f[k].norm()
        } else {
            0.0
        }
    })
}

/// `d/dz d/dzbar = Laplacian / 4` of a complex field, zero on the boundary.
fn dzdzb(f: &[C64], g: &Grid2) -> Vec<C64> {
    let re: Vec<f64> = f.iter().map(|z| z.re).collect();
    let im: Vec<f64> = f.iter().map(|z| z.im).collect();
    crate::par::map(g.len(), |k| {
        let (i, j) = g.ij(k);
        if g.is_interior(i, j) {
            C64::new(
                crate::grid::laplacian_at(&re, g, i, j),
                crate::grid::laplacian_at(&im, g, i, j),
            ) * 0.25
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Compatibility residual fields for `kind`.
///
/// * general: `comp_rho = Im dzb rho - H e^u Im c`, `complex_comp1`,
///   `complex_comp2` (the (1,1) and (2,1) curvature entries, normalized),
/// * lagrangian: `dzb phi - dz phibar`, `u_zzb - |phi|^2 + e^{-2u}|Q|^2 + H e^u`,
///   `e^u (dz phi - phi dz u) - H dzb Q`,
/// * minimal: `dzb Q`, `theta_zzb - 3 H e^u cot theta`, `Re complex_comp1`,
/// * minlag: `u_zzb + e^{-2u}|Q|^2 + H e^u`, `dzb Q`.
pub fn compat_residual_fields(data: &SurfaceData, kind: Kind) -> Result<ResidualFields> {
    data.validate()?;
    data.grid.require(5)?;
    let d = data.specialize(kind);
    let g = d.grid;
    let h = d.sig.h();
    let n = g.len();
    let c = d.c();
    let uc: Vec<C64> = d.u.iter().map(|u| C64::new(*u, 0.0)).collect();
    let (du, _) = dz_dzb_real(&d.u, &g, Order::Second)?;
    let u_zzb = dzdzb(&uc, &g);
    let (_, dbq) = dz_dzb(&d.q, &g, Order::Second)?;
    let eu: Vec<f64> = d.u.iter().map(|u| math::exp(*u)).collect();
    let tz = |k: usize| d.q[k].norm_sqr() / (eu[k] * eu[k]) + h * eu[k];

    let fields = match kind {
        Kind::MinLag => {
            let tzi: Vec<C64> = (0..n).map(|k| u_zzb[k] + tz(k)).collect();
            alloc::vec![("tzitzeica", tzi), ("holomorphic_Q", dbq)]
        }
        Kind::Lagrangian => {
            let (dphi, dbphi) = dz_dzb(&d.phi, &g, Order::Second)?;
            let a: Vec<C64> = (0..n).map(|k| dbphi[k] - dphi[k].conj()).collect();
            let b: Vec<C64> = (0..n)
                .map(|k| u_zzb[k] - d.phi[k].norm_sqr() + tz(k))
                .collect();
            let cc: Vec<C64> = (0..n)
                .map(|k| (dphi[k] - d.phi[k] * du[k]) * eu[k] - dbq[k] * h)
                .collect();
            alloc::vec![
                ("lagrangian_imag", a),
                ("lagrangian_real", b),
                ("lagrangian_cubic", cc)
            ]
        }
        Kind::Minimal | Kind::General => {
            let comp1 = comp1_field(&d, &c, &eu)?;
            if kind == Kind::Minimal {
                let th: Vec<C64> = d.theta.iter().map(|t| C64::new(*t, 0.0)).collect();
                let th_zzb = dzdzb(&th, &g);
                let theq: Vec<C64> = (0..n)
                    .map(|k| th_zzb[k] - 3.0 * h * eu[k] / math::tan(d.theta[k]))
                    .collect();
                let re1: Vec<C64> = comp1.iter().map(|z| C64::new(z.re, 0.0)).collect();
                alloc::vec![
                    ("holomorphic_Q", dbq),
                    ("theta_equation", theq),
                    ("comp1_real", re1)
                ]
            } else {
                let (_, dbrho) = dz_dzb(&d.rho, &g, Order::Second)?;
                let crho: Vec<C64> = (0..n)
                    .map(|k| C64::new(dbrho[k].im - h * eu[k] * c[k].im, 0.0))
                    .collect();
                let comp2 = comp2_field(&d, &c, &eu, &du, &dbq)?;
                alloc::vec![
                    ("comp_rho", crho),
                    ("complex_comp1", comp1),
                    ("complex_comp2", comp2)
                ]
            }
        }
    };
    Ok(ResidualFields { kind, fields })
}

fn comp1_field(d: &SurfaceData, c: &[C64], eu: &[f64]) -> Result<Vec<C64>> {
    let g = d.grid;
    let h = d.sig.h();
    let a: Vec<C64> = d.phi.iter().zip(c).map(|(p, c)| p.conj() / *c).collect();
    let b: Vec<C64> = d.phi.iter().zip(c).map(|(p, c)| *p / *c).collect();
    let (da, _) = dz_dzb(&a, &g, Order::Second)?;
    let (_, dbb) = dz_dzb(&b, &g, Order::Second)?;
    let l: Vec<C64> = c.iter().zip(&d.u).map(|(c, u)| c.ln() + *u).collect();
    let l_zzb = dzdzb(&l, &g);
    Ok((0..g.len())
        .map(|k| {
            let c2 = c[k].norm_sqr();
            da[k] - dbb[k] - l_zzb[k] + d.phi[k].norm_sqr() / c2
                - d.q[k].norm_sqr() / (eu[k] * eu[k] * c2)
                - (c[k] * 2.0 - c[k].conj()) * (h * eu[k])
        })
        .collect())
}

fn comp2_field(
    d: &SurfaceData,
    c: &[C64],
    eu: &[f64],
    du: &[C64],
    dbq: &[C64],
) -> Result<Vec<C64>> {
    let g = d.grid;
    let h = d.sig.h();
    let (dphi, _) = dz_dzb(&d.phi, &g, Order::Second)?;
    let lc: Vec<f64> = c.iter().map(|c| math::ln(c.norm_sqr())).collect();
    let (dlc, _) = dz_dzb_real(&lc, &g, Order::Second)?;
    Ok((0..g.len())
        .map(|k| {
            let (ck, cb) = (c[k], c[k].conj());
            let p = d.phi[k];
            (dphi[k] - p * du[k] - p * dlc[k]) * eu[k]
                + p * p * eu[k] * (cb.inv() - ck.inv())
                + d.q[k] * p.conj() * h * (ck.inv() - cb.inv())
                - dbq[k] * h
        })
        .collect())
}

/// Interior max-abs of each residual field for `kind`.
pub fn compat_residuals(data: &SurfaceData, kind: Kind) -> Result<Residuals> {
    let f = compat_residual_fields(data, kind)?;
    let g = data.grid;
    Ok(Residuals {
        kind,
        entries: f
            .fields
            .iter()
            .map(|(n, v)| (*n, interior_max(&g, v)))
            .collect(),
    })
}

/// Real-coordinate `(Gamma, h, psi)` of the surface, for the general-`n` machinery.
///
/// Complex components: `Gamma^z_zz = phi/c + dz(log c + u)`,
/// `Gamma^zb_zz = H cbar^{-1} e^{-u} Q`, `Gamma^z_{z zb} = c^{-1} phibar`,
/// `Gamma^zb_{z zb} = cbar^{-1} phi` and conjugates; `h_{z zb} = H e^u c`,
/// `h_{zb z} = H e^u cbar`; `psi_z = rho`.
pub fn to_immersion_data(data: &SurfaceData, order: Order) -> Result<ImmersionDataN> {
    data.validate()?;
    let g = data.grid;
    let h = data.sig.h();
    let c = data.c();
    let l: Vec<C64> = c.iter().zip(&data.u).map(|(c, u)| c.ln() + *u).collect();
    let (dl, _) = dz_dzb(&l, &g, order)?;
    let n = g.len();
    let one = C64::new(1.0, 0.0);
    // complex components of the real basis vectors, and real components of dz, dzb
    let nv = [[one, one], [I, -I]];
    let mv = [
        [C64::new(0.5, 0.0), C64::new(0.5, 0.0)],
        [C64::new(0.0, -0.5), C64::new(0.0, 0.5)],
    ];
    let mut gamma = Vec::with_capacity(n * 8);
    let mut hr = Vec::with_capacity(n * 4);
    let mut psi = Vec::with_capacity(n * 2);
    for k in 0..n {
        let ck = c[k];
        let cb = ck.conj();
        let eu = math::exp(data.u[k]);
        let p = data.phi[k];
        // gc[I][J][K] with 0 = z, 1 = zbar
        let mut gc = [[[C64::new(0.0, 0.0); 2]; 2]; 2];
        gc[0][0][0] = p / ck + dl[k];
        gc[1][0][0] = data.q[k] * (h / eu) / cb;
        gc[0][0][1] = p.conj() / ck;
        gc[0][1][0] = gc[0][0][1];
        gc[1][0][1] = p / cb;
        gc[1][1][0] = gc[1][0][1];
        gc[1][1][1] = gc[0][0][0].conj();
        gc[0][1][1] = gc[1][0][0].conj();
        let hc = [
            [C64::new(0.0, 0.0), ck * (h * eu)],
            [cb * (h * eu), C64::new(0.0, 0.0)],
        ];
        for a in 0..2 {
            for b in 0..2 {
                for cc in 0..2 {
                    let mut s = C64::new(0.0, 0.0);
                    for ii in 0..2 {
                        for jj in 0..2 {
                            for kk in 0..2 {
                                s += mv[a][ii] * gc[ii][jj][kk] * nv[b][jj] * nv[cc][kk];
                            }
                        }
                    }
                    gamma.push(s.re);
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                let mut s = C64::new(0.0, 0.0);
                for ii in 0..2 {
                    for jj in 0..2 {
                        s += hc[ii][jj] * nv[a][ii] * nv[b][jj];
                    }
                }
                hr.push(s.re);
            }
        }
        psi.push(2.0 * data.rho[k].re);
        psi.push(-2.0 * data.rho[k].im);
    }
    let gn = GridN::new(
        alloc::vec![g.nx, g.ny],
        alloc::vec![g.hx, g.hy],
        alloc::vec![g.x0, g.y0],
    )?;
    ImmersionDataN::new(gn, gamma, hr, psi)
}
