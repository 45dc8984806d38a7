//! Integration of the frame equations `dF = F (Uz dz + Uzb dzb)` over a
//! rectangle, loop-closure and flatness diagnostics, extraction of the lift
//! `(x, chi)` from the frame, recovery of the surface fields from the lift,
//! and the second fundamental form in the ambient quadric model.

mod sff;

pub use sff::{
    induced_data, mean_curvature_residual, second_fundamental_form, second_fundamental_form_field,
    InducedData, SecondFundamentalForm,
};

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;

use crate::grid::{dz_dzb, Grid2, Order};
use crate::liealg::{expm, rh_conjugate, Mat3C, Signature};
use crate::paracomplex::{lift_forms, LiftSamples, PointCM};
use crate::surface2d::{
    build_mc_with, curvature, gauge, normalize_det, solve_tzitzeica, theta_from_c, Kind, McPair,
    NewtonOptions, NewtonReport, SurfaceData,
};
use crate::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Order in which the two coordinate directions are swept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    /// Up the left edge along `y2`, then every row along `y1`.
    RowMajor,
    /// Along the bottom edge in `y1`, then every column along `y2`.
    ColumnMajor,
}

/// Frame values on the grid, integrated from `finit` at the base point.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameField {
    pub sig: Signature,
    pub grid: Grid2,
    pub f: Vec<Mat3C>,
    pub base: usize,
    pub finit: Mat3C,
}

/// Trace-free exponential and scalar increment for the step from `pts[s]`
/// to `pts[s + 1]` along `axis`.
fn step(mc: &McPair, pts: &[usize], s: usize, axis: usize) -> Result<(Mat3C, C64)> {
    let (a, b) = (pts[s], pts[s + 1]);
    let mz = (mc.uz[a] + mc.uz[b]) * 0.5;
    let mzb = (mc.uzb[a] + mc.uzb[b]) * 0.5;
    let inc = if axis == 0 {
        (mz + mzb) * mc.grid.hx
    } else {
        (mz - mzb) * (I * mc.grid.hy)
    };
    let t = inc.trace() / 3.0;
    Ok((expm(&inc.trace_free())?, t))
}

fn sweep(
    mc: &McPair,
    start: (Mat3C, C64),
    pts: &[usize],
    axis: usize,
) -> Result<Vec<(Mat3C, C64)>> {
    let mut out = Vec::with_capacity(pts.len());
    out.push(start);
    for s in 0..pts.len().saturating_sub(1) {
        let (e, t) = step(mc, pts, s, axis)?;
        let (f, acc) = *out.last().expect("non-empty");
        out.push((f * e, acc + t));
    }
    Ok(out)
}

/// Exponential-midpoint integration from `finit` at the corner `(x0, y0)`.
///
/// The trace of each increment is accumulated as a scalar and reapplied at
/// the end, so the matrix exponentials act on trace-free matrices.
pub fn integrate_frame(mc: &McPair, finit: &Mat3C, mode: PathMode) -> Result<FrameField> {
    let g = mc.grid;
    g.check_len(mc.uz.len())?;
    g.check_len(mc.uzb.len())?;
    let d0 = finit.det();
    if !(d0.norm() > 1e-14) || !finit.is_finite() {
        return Err(Error::Singular);
    }
    let (outer_axis, inner_axis, n_outer, n_inner) = match mode {
        PathMode::RowMajor => (1, 0, g.ny, g.nx),
        PathMode::ColumnMajor => (0, 1, g.nx, g.ny),
    };
    let at = |outer: usize, inner: usize| -> usize {
        if outer_axis == 1 {
            g.idx(inner, outer)
        } else {
            g.idx(outer, inner)
        }
    };
    let edge: Vec<usize> = (0..n_outer).map(|o| at(o, 0)).collect();
    let edge_vals = sweep(mc, (*finit, C64::new(0.0, 0.0)), &edge, outer_axis)?;
    let lines: Vec<Result<Vec<(Mat3C, C64)>>> = crate::par::map(n_outer, |o| {
        let pts: Vec<usize> = (0..n_inner).map(|i| at(o, i)).collect();
        sweep(mc, edge_vals[o], &pts, inner_axis)
    });
    let mut f = alloc::vec![Mat3C::ZERO; g.len()];
    for (o, line) in lines.into_iter().enumerate() {
        for (i, (m, s)) in line?.into_iter().enumerate() {
            let v = m * s.exp();
            if !v.is_finite() {
                return Err(Error::Overflow);
            }
            f[at(o, i)] = v;
        }
    }
    Ok(FrameField {
        sig: mc.sig,
        grid: g,
        f,
        base: 0,
        finit: *finit,
    })
}

/// Largest entrywise difference between the row-major and column-major frames.
pub fn loop_disagreement(mc: &McPair, finit: &Mat3C) -> Result<f64> {
    let a = integrate_frame(mc, finit, PathMode::RowMajor)?;
    let b = integrate_frame(mc, finit, PathMode::ColumnMajor)?;
    Ok(a.f
        .iter()
        .zip(&b.f)
        .map(|(x, y)| (*x - *y).max_abs())
        .fold(0.0, f64::max))
}

/// Pointwise Frobenius norm of `dz Uzb - dzb Uz + [Uz, Uzb]`.
pub fn flatness_residual(mc: &McPair) -> Result<Vec<f64>> {
    mc.grid.require(3)?;
    Ok(curvature(mc, Order::Second)?
        .iter()
        .map(|m| m.norm())
        .collect())
}

/// Interior maximum of [`flatness_residual`].
pub fn flatness_max(mc: &McPair) -> Result<f64> {
    let r = flatness_residual(mc)?;
    let g = mc.grid;
    Ok(crate::par::max_of(g.len(), |k| {
        let (i, j) = g.ij(k);
        if g.is_interior(i, j) {
            r[k]
        } else {
            0.0
        }
    }))
}

impl FrameField {
    /// Largest `|det F - 1|`.
    pub fn unimodularity(&self) -> f64 {
        self.f
            .iter()
            .map(|m| (m.det() - 1.0).norm())
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part of `R_H F R_H^{-1}`.
    pub fn reality_residual(&self) -> f64 {
        self.f
            .iter()
            .map(|m| rh_conjugate(m, self.sig).max_imag())
            .fold(0.0, f64::max)
    }
}

/// `(y1, y2)`, `x` and `chi` at one grid node.
pub type SurfaceRow = ([f64; 2], [f64; 3], [f64; 3]);

/// Lift and horizontal frame vectors recovered from a frame.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftField {
    pub sig: Signature,
    pub grid: Grid2,
    pub x: Vec<[f64; 3]>,
    pub chi: Vec<[f64; 3]>,
    pub xi: Vec<[C64; 3]>,
    pub eta: Vec<[C64; 3]>,
}

/// Undoes the gauge and the ambient change of basis:
/// `(xi, xibar, x) = kappa R_H F D^{-1}` with `kappa = 1` for `H = 1` and
/// `kappa = i` for `H = -1`; `(etabar, eta, chi)` are the columns of
/// `(xi, xibar, x)^{-T} diag(H c e^u, H cbar e^u, 1)`.
pub fn extract_lift(frame: &FrameField, data: &SurfaceData) -> Result<LiftField> {
    let g = frame.grid;
    if g != data.grid || frame.sig != data.sig {
        return Err(Error::InvalidParameter(
            "frame and surface data disagree on grid or signature",
        ));
    }
    g.check_len(frame.f.len())?;
    let s = frame.sig;
    let kappa = if s.value() == 1 {
        C64::new(1.0, 0.0)
    } else {
        I
    };
    let rk = s.r_h() * kappa;
    let c = data.c();
    let h = s.h();
    let n = g.len();
    let mut x = Vec::with_capacity(n);
    let mut chi = Vec::with_capacity(n);
    let mut xi = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    for k in 0..n {
        let d = gauge(s, data.u[k], c[k]);
        let dinv = d.inverse().ok_or(Error::Singular)?;
        let ft = rk * frame.f[k] * dinv;
        let fit = ft.inverse().ok_or(Error::Singular)?.transpose();
        let eu = crate::math::exp(data.u[k]);
        let xc = ft.column(2);
        let cc = fit.column(2);
        let scale = xc.iter().chain(&cc).map(|z| z.norm()).fold(1.0, f64::max);
        let imag = xc.iter().chain(&cc).map(|z| z.im.abs()).fold(0.0, f64::max);
        if !(imag <= 1e-8 * scale) {
            return Err(Error::NotReal { imag });
        }
        x.push([xc[0].re, xc[1].re, xc[2].re]);
        chi.push([cc[0].re, cc[1].re, cc[2].re]);
        xi.push(ft.column(0));
        let e = fit.column(1);
        let f2 = c[k].conj() * (h * eu);
        eta.push([e[0] * f2, e[1] * f2, e[2] * f2]);
    }
    Ok(LiftField {
        sig: s,
        grid: g,
        x,
        chi,
        xi,
        eta,
    })
}

impl LiftField {
    pub fn samples(&self) -> LiftSamples {
        LiftSamples {
            grid: self.grid,
            x: self.x.clone(),
            chi: self.chi.clone(),
        }
    }

    /// Largest `|<x, chi> - 1|`, `|<xi, chi>|`, `|<x, eta>|`, `|<xi, eta>|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..self.x.len() {
            let (x, ch, xi, eta) = (&self.x[k], &self.chi[k], &self.xi[k], &self.eta[k]);
            let mut xc = -1.0;
            let mut a = C64::new(0.0, 0.0);
            let mut b = C64::new(0.0, 0.0);
            let mut e = C64::new(0.0, 0.0);
            for i in 0..3 {
                xc += x[i] * ch[i];
                a += xi[i] * ch[i];
                b += eta[i] * x[i];
                e += xi[i] * eta[i];
            }
            worst = worst
                .max(xc.abs())
                .max(a.norm())
                .max(b.norm())
                .max(e.norm());
        }
        worst
    }

    /// Largest `|<xi, etabar> - H e^u c|` against the generating data.
    pub fn product_residual(&self, data: &SurfaceData) -> f64 {
        let c = data.c();
        let h = self.sig.h();
        let mut worst = 0.0_f64;
        for k in 0..self.x.len() {
            let w: C64 = (0..3).map(|i| self.xi[k][i] * self.eta[k][i].conj()).sum();
            worst = worst.max((w - c[k] * (h * crate::math::exp(data.u[k]))).norm());
        }
        worst
    }

    /// Plot rows `(y1, y2, x, chi)` of the representative with `|x| = |chi|`.
    pub fn surface_rows(&self) -> Result<Vec<SurfaceRow>> {
        let mut out = Vec::with_capacity(self.x.len());
        for k in 0..self.x.len() {
            let (i, j) = self.grid.ij(k);
            let (y1, y2) = self.grid.coords(i, j);
            let p = PointCM {
                x: self.x[k],
                chi: self.chi[k],
            }
            .s2n_normalized()?;
            out.push(([y1, y2], p.x, p.chi));
        }
        Ok(out)
    }
}

/// Surface fields recovered from a lift, with deviations from a reference.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundTrip {
    pub recovered: SurfaceData,
    pub err_u: f64,
    pub err_theta: f64,
    pub err_phi: f64,
    pub err_q: f64,
    pub err_rho: f64,
}

impl RoundTrip {
    pub fn max_error(&self) -> f64 {
        [
            self.err_u,
            self.err_theta,
            self.err_phi,
            self.err_q,
            self.err_rho,
        ]
        .iter()
        .fold(0.0_f64, |m, v| m.max(*v))
    }
}

/// Recovers `(u, theta, phi, Q, rho)` from the lift:
/// `<xi, etabar> = H e^u c`, `Q = <dz xi, eta>`, `phi = H e^{-u} <dzb xi, eta>`,
/// `rho = <dz x, chi>`. Uses fourth-order differences when the grid allows.
pub fn recover(lift: &LiftField) -> Result<SurfaceData> {
    let g = lift.grid;
    g.require(3)?;
    let order = if g.nx.min(g.ny) >= 5 {
        Order::Fourth
    } else {
        Order::Second
    };
    let forms = lift_forms(&lift.samples(), order)?;
    let h = lift.sig.h();
    let n = g.len();
    let mut u = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    for k in 0..n {
        let w: C64 = (0..3).map(|i| lift.xi[k][i] * lift.eta[k][i].conj()).sum();
        let a = h * w.re;
        if !(a > 0.0) {
            return Err(Error::DegenerateTangent);
        }
        u.push(crate::math::ln(a));
        theta.push(theta_from_c(w / w.re));
    }
    let mut dxi = alloc::vec![[C64::new(0.0, 0.0); 3]; n];
    let mut dbxi = alloc::vec![[C64::new(0.0, 0.0); 3]; n];
    for c in 0..3 {
        let comp: Vec<C64> = lift.xi.iter().map(|v| v[c]).collect();
        let (dz, dzb) = dz_dzb(&comp, &g, order)?;
        for k in 0..n {
            dxi[k][c] = dz[k];
            dbxi[k][c] = dzb[k];
        }
    }
    let mut phi = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for k in 0..n {
        let eta = &lift.eta[k];
        let qk: C64 = (0..3).map(|i| dxi[k][i] * eta[i]).sum();
        let pk: C64 = (0..3).map(|i| dbxi[k][i] * eta[i]).sum();
        q.push(qk);
        phi.push(pk * (h * crate::math::exp(-u[k])));
    }
    let rho = forms.iter().map(|f| f.rho).collect();
    let theta = theta
        .into_iter()
        .map(|t: f64| if t.is_finite() { t } else { FRAC_PI_2 })
        .collect();
    SurfaceData::new(lift.sig, g, u, theta, phi, q, rho)
}

/// `rho` of the lift taken from a unimodular frame: removing the trace
/// `tr Uz / 3` leaves `rho - tr Uz / 3 = -2 phi / (3 |c|^2) - i dz theta / 3`,
/// whatever `rho` the data carried.
pub fn unimodular_rho(data: &SurfaceData) -> Result<Vec<C64>> {
    let g = data.grid;
    let order = if g.nx.min(g.ny) >= 5 {
        Order::Fourth
    } else {
        Order::Second
    };
    let (dth, _) = crate::grid::dz_dzb_real(&data.theta, &g, order)?;
    Ok(data
        .c()
        .iter()
        .zip(&data.phi)
        .zip(&dth)
        .map(|((c, phi), dth)| *phi * (-2.0 / (3.0 * c.norm_sqr())) - I * *dth / 3.0)
        .collect())
}

/// [`recover`] plus interior max-abs deviations from `reference`. The
/// reference `rho` is replaced by [`unimodular_rho`], since the lift comes
/// from a frame with unit determinant.
pub fn round_trip(lift: &LiftField, reference: &SurfaceData) -> Result<RoundTrip> {
    if reference.grid != lift.grid {
        return Err(Error::InvalidParameter(
            "reference grid differs from lift grid",
        ));
    }
    let r = recover(lift)?;
    let rho_ref = unimodular_rho(reference)?;
    let g = lift.grid;
    let dev = |f: &(dyn Fn(usize) -> f64 + Sync)| -> f64 {
        crate::par::max_of(g.len(), |k| {
            let (i, j) = g.ij(k);
            if g.is_interior(i, j) {
                f(k)
            } else {
                0.0
            }
        })
    };
    Ok(RoundTrip {
        err_u: dev(&|k| (r.u[k] - reference.u[k]).abs()),
        err_theta: dev(&|k| (r.theta[k] - reference.theta[k]).abs()),
        err_phi: dev(&|k| (r.phi[k] - reference.phi[k]).norm()),
        err_q: dev(&|k| (r.q[k] - reference.q[k]).norm()),
        err_rho: dev(&|k| (r.rho[k] - rho_ref[k]).norm()),
        recovered: r,
    })
}

/// Every stage of a reconstruction from surface data.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub mc: McPair,
    pub frame: FrameField,
    pub lift: LiftField,
    pub round_trip: RoundTrip,
}

/// Builds the Maurer-Cartan pair (fourth-order derivatives when the grid
/// allows, so that edge stencils do not leak into the interior), integrates
/// row-major from the identity, normalizes the determinant, extracts the lift
/// and recovers the fields.
pub fn reconstruct(data: &SurfaceData, kind: Kind) -> Result<Reconstruction> {
    let g = data.grid;
    let order = if g.nx.min(g.ny) >= 5 {
        Order::Fourth
    } else {
        Order::Second
    };
    let mc = build_mc_with(data, kind, order, false)?;
    let mut frame = integrate_frame(&mc, &Mat3C::IDENTITY, PathMode::RowMajor)?;
    frame.f = normalize_det(&frame.f)?.0;
    let lift = extract_lift(&frame, data)?;
    let round_trip = round_trip(&lift, &data.specialize(kind))?;
    Ok(Reconstruction {
        mc,
        frame,
        lift,
        round_trip,
    })
}

/// Solution of the Tzitzeica equation together with its reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthesis {
    pub newton: NewtonReport,
    pub data: SurfaceData,
    pub reconstruction: Reconstruction,
}

/// Solves the Tzitzeica equation for `u` with Dirichlet values from
/// `boundary`, then reconstructs the minimal Lagrangian surface.
pub fn synthesize_minlag(
    sig: Signature,
    grid: &Grid2,
    q: &[C64],
    boundary: &[f64],
    opts: &NewtonOptions,
) -> Result<Synthesis> {
    let newton = solve_tzitzeica(sig, grid, q, boundary, None, opts)?;
    let data = SurfaceData::minlag(sig, *grid, newton.u.clone(), q.to_vec())?;
    let reconstruction = reconstruct(&data, Kind::MinLag)?;
    Ok(Synthesis {
        newton,
        data,
        reconstruction,
    })
}
