//! Matrix models of the homogeneous bundles over `DP^2` and the Gauss maps
//! of frames into them.
//!
//! * `FL3`: orbit of `P_H^eps` under the congruence `M -> U M U^T`.
//! * `SLGr`: orbit of `P_H = P^eps (P^eps)^T P^eps` under congruence.
//! * `Fl2`: orbit of `P_2 = P^eps (P^eps)^T` under conjugation.
//!
//! `FL3` projects onto the other two by `M -> M M^{-T} M` and `M -> M M^{-T}`.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::integrator::FrameField;
use crate::liealg::{in_slr, p2, rh_unconjugate, Mat3C, Signature};
use crate::surface2d::{primitive_check, Certificate, McPair};
use crate::{math, Error, Result};

/// Target bundle of a Gauss map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GaussKind {
    /// Full flag bundle, stabilizer `diag(a, 1/a, 1)` with `|a| = 1`.
    Fl3,
    /// Grassmannian model, stabilizer the twisted `SO(3)`.
    SlGr,
    /// Flag model, stabilizer the diagonal unimodular matrices.
    Fl2,
}

impl GaussKind {
    pub const ALL: [GaussKind; 3] = [GaussKind::Fl3, GaussKind::SlGr, GaussKind::Fl2];

    pub fn name(self) -> &'static str {
        match self {
            GaussKind::Fl3 => "FL3",
            GaussKind::SlGr => "SLGr",
            GaussKind::Fl2 => "Fl2",
        }
    }

    /// Order `k` of the automorphism `sigma_H^(6/k)` whose primitive maps
    /// project harmonically to this bundle.
    pub fn order(self) -> usize {
        match self {
            GaussKind::Fl3 => 6,
            GaussKind::Fl2 => 3,
            GaussKind::SlGr => 2,
        }
    }

    pub fn from_order(k: usize) -> Result<Self> {
        match k {
            6 => Ok(GaussKind::Fl3),
            3 => Ok(GaussKind::Fl2),
            2 => Ok(GaussKind::SlGr),
            _ => Err(Error::InvalidParameter("order k must be 6, 3 or 2")),
        }
    }

    /// Base point: `P_H^eps`, `P_H` or `P_2`.
    pub fn base(self, s: Signature) -> Mat3C {
        match self {
            GaussKind::Fl3 => s.p_eps(),
            GaussKind::SlGr => s.p_h(),
            GaussKind::Fl2 => p2(),
        }
    }
}

impl fmt::Display for GaussKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point of one of the matrix models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussPoint {
    pub kind: GaussKind,
    pub m: Mat3C,
}

/// Tolerance of the real-form test applied to frames, relative to their size.
const REAL_FORM_TOL: f64 = 1e-8;

fn check_real_form(u: &Mat3C, s: Signature) -> Result<()> {
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = u.max_abs().max(1.0);
    if in_slr(u, s, REAL_FORM_TOL * scale) {
        Ok(())
    } else {
        Err(Error::NotInRealForm {
            residual: (crate::liealg::tau(u, s) - *u).max_abs(),
        })
    }
}

/// Left action of the group: congruence for `FL3` and `SLGr`, conjugation
/// for `Fl2`.
pub fn act(kind: GaussKind, g: &Mat3C, m: &Mat3C) -> Result<Mat3C> {
    match kind {
        GaussKind::Fl3 | GaussKind::SlGr => Ok(*g * *m * g.transpose()),
        GaussKind::Fl2 => Ok(*g * *m * g.inverse().ok_or(Error::Singular)?),
    }
}

fn gauss_unchecked(kind: GaussKind, u: &Mat3C, s: Signature) -> Result<GaussPoint> {
    Ok(GaussPoint {
        kind,
        m: act(kind, u, &kind.base(s))?,
    })
}

/// Image of `u` (in the twisted real group) in the chosen model.
pub fn gauss(kind: GaussKind, u: &Mat3C, s: Signature) -> Result<GaussPoint> {
    check_real_form(u, s)?;
    gauss_unchecked(kind, u, s)
}

/// `U P_H^eps U^T`.
pub fn gauss_fl3(u: &Mat3C, s: Signature) -> Result<GaussPoint> {
    gauss(GaussKind::Fl3, u, s)
}

/// `U P_H U^T`.
pub fn gauss_slgr(u: &Mat3C, s: Signature) -> Result<GaussPoint> {
    gauss(GaussKind::SlGr, u, s)
}

/// `U P_2 U^{-1}`.
pub fn gauss_fl2(u: &Mat3C, s: Signature) -> Result<GaussPoint> {
    gauss(GaussKind::Fl2, u, s)
}

/// `M M^{-T} M`: from `FL3` to `SLGr`.
pub fn project_slgr(m: &Mat3C) -> Result<Mat3C> {
    Ok(project_fl2(m)? * *m)
}

/// `M M^{-T}`: from `FL3` to `Fl2`.
pub fn project_fl2(m: &Mat3C) -> Result<Mat3C> {
    Ok(*m * m.transpose().inverse().ok_or(Error::Singular)?)
}

/// Distance of a point from the defining equations of its model:
/// `Fl2` needs `M^3 = I`, `tr M = tr M^2 = 0`; `SLGr` needs `M = M^T` and
/// `det M = H`; `FL3` needs `M M^{-T}` in `Fl2` and `det M = H`.
pub fn orbit_residual(p: &GaussPoint, s: Signature) -> Result<f64> {
    let m = p.m;
    let fl2 = |m: &Mat3C| {
        let m2 = *m * *m;
        (m2 * *m - Mat3C::IDENTITY).max_abs() + m.trace().norm() + m2.trace().norm()
    };
    Ok(match p.kind {
        GaussKind::Fl2 => fl2(&m),
        GaussKind::SlGr => (m - m.transpose()).max_abs() + (m.det() - s.h()).norm(),
        GaussKind::Fl3 => fl2(&project_fl2(&m)?) + (m.det() - s.h()).norm(),
    })
}

/// Random element of the stabilizer of the base point of `kind`.
pub fn stabilizer_sample<R: Rng + ?Sized>(kind: GaussKind, s: Signature, rng: &mut R) -> Mat3C {
    let one = C64::new(1.0, 0.0);
    match kind {
        GaussKind::Fl3 => {
            let t = rng.gen_range(-core::f64::consts::PI..core::f64::consts::PI);
            let a = C64::new(math::cos(t), math::sin(t));
            Mat3C::diag(a, a.conj(), one)
        }
        GaussKind::Fl2 => {
            let mut z = || {
                let r = math::exp(rng.gen_range(-0.7..0.7));
                let t = rng.gen_range(-core::f64::consts::PI..core::f64::consts::PI);
                C64::new(r * math::cos(t), r * math::sin(t))
            };
            let (a, b) = (z(), z());
            Mat3C::diag(a, b, (a * b).inv())
        }
        GaussKind::SlGr => {
            let mut ang = || rng.gen_range(-core::f64::consts::PI..core::f64::consts::PI);
            let o = rotation(ang(), ang(), ang());
            rh_unconjugate(&o, s)
        }
    }
}

/// Rotation `R_z(a) R_y(b) R_z(c)`.
fn rotation(a: f64, b: f64, c: f64) -> Mat3C {
    let rz = |t: f64| {
        let (s, c) = (math::sin(t), math::cos(t));
        Mat3C::from_real([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    };
    let (sb, cb) = (math::sin(b), math::cos(b));
    let ry = Mat3C::from_real([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]]);
    rz(a) * ry * rz(c)
}

/// Random element of the twisted real group with moderate condition number:
/// `Ad(R_H^{-1})` of `I + A/2`, `A` uniform in `[-1, 1]`, scaled to `det = 1`.
pub fn real_form_sample<R: Rng + ?Sized>(s: Signature, rng: &mut R) -> Mat3C {
    loop {
        let mut a = [[0.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = 0.5 * rng.gen_range(-1.0..1.0) + if i == j { 1.0 } else { 0.0 };
            }
        }
        let m = Mat3C::from_real(a);
        let d = m.det().re;
        if d > 0.1 {
            return rh_unconjugate(&(m * (1.0 / math::cbrt(d))), s);
        }
    }
}

/// Largest entrywise `|gauss(U k) - gauss(U)|` over `trials` random real-form
/// `U` and stabilizer elements `k`.
pub fn stabilizer_invariance<R: Rng + ?Sized>(
    kind: GaussKind,
    s: Signature,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let u = real_form_sample(s, rng);
        let k = stabilizer_sample(kind, s, rng);
        let a = gauss_unchecked(kind, &u, s)?.m;
        let b = gauss_unchecked(kind, &(u * k), s)?.m;
        worst = worst.max((a - b).max_abs());
    }
    Ok(worst)
}

/// Pointwise Gauss map of a frame field into the chosen model.
pub fn gauss_of_frame(frame: &FrameField, kind: GaussKind) -> Result<Vec<GaussPoint>> {
    frame.f.iter().map(|u| gauss(kind, u, frame.sig)).collect()
}

/// Agreement of the two routes from a frame to `SLGr` and `Fl2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagramReport {
    /// Largest `|M M^{-T} M - U P_H U^T|`, relative to `max(1, |U P_H U^T|)`.
    pub slgr: f64,
    /// Largest `|M M^{-T} - U P_2 U^{-1}|`, relative to `max(1, |U P_2 U^{-1}|)`.
    pub fl2: f64,
}

impl DiagramReport {
    pub fn max(&self) -> f64 {
        self.slgr.max(self.fl2)
    }
}

/// Compares the projections of the `FL3` map with the directly computed
/// `SLGr` and `Fl2` maps at every grid point.
pub fn diagram_check(frame: &FrameField) -> Result<DiagramReport> {
    let s = frame.sig;
    let mut rep = DiagramReport {
        slgr: 0.0,
        fl2: 0.0,
    };
    for u in &frame.f {
        let m = gauss_fl3(u, s)?.m;
        let g = gauss_unchecked(GaussKind::SlGr, u, s)?.m;
        let f = gauss_unchecked(GaussKind::Fl2, u, s)?.m;
        rep.slgr = rep
            .slgr
            .max((project_slgr(&m)? - g).max_abs() / g.max_abs().max(1.0));
        rep.fl2 = rep
            .fl2
            .max((project_fl2(&m)? - f).max_abs() / f.max_abs().max(1.0));
    }
    Ok(rep)
}

/// Primitivity certificate attached to the Gauss map it controls.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicityCertificate {
    pub map: GaussKind,
    pub certificate: Certificate,
}

/// Certifies `mc` against `sigma_H^(6/k)` and attaches the result to the
/// Gauss map into `FL3` (`k = 6`), `Fl2` (`k = 3`) or `SLGr` (`k = 2`).
pub fn harmonicity_certificate(
    frame: &FrameField,
    mc: &McPair,
    k: usize,
    tol: f64,
) -> Result<HarmonicityCertificate> {
    let map = GaussKind::from_order(k)?;
    if frame.grid != mc.grid || frame.sig != mc.sig {
        return Err(Error::InvalidParameter(
            "frame and Maurer-Cartan pair disagree on grid or signature",
        ));
    }
    for u in &frame.f {
        check_real_form(u, frame.sig)?;
    }
    Ok(HarmonicityCertificate {
        map,
        certificate: primitive_check(mc, k, tol)?,
    })
}
