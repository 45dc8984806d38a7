//! Frame equations of an immersion `M^n -> DP^n` in local coordinates.
//!
//! Inputs are the connection `Gamma^a_{bc}`, the (possibly non-symmetric)
//! tensor `h_{ab}` and the 1-form `psi_a`, sampled on a uniform grid in
//! `R^n` (`n = 2` or `3`). The module builds the Maurer-Cartan matrices,
//! evaluates the three compatibility conditions, Riemann/Ricci/Weyl
//! curvature, the cubic form `C = nabla h`, the difference tensor `K` and
//! the Tchebycheff form `T`.
//!
//! Index layout per grid point:
//! * `gamma[a][b][c]` is `Gamma^a_{bc}` (flattened `a n^2 + b n + c`),
//! * `h[a][b]` is `h_{ab}`,
//! * `C[a][b][c] = (nabla_c h)_{ab}`: the derivative sits in the **last** slot,
//! * `K[m][x][y]` solves `h_{z m} K^m_{xy} = C_{z y x}`, i.e.
//!   `(nabla_X h)(Z, Y) = h(Z, K(X, Y))`,
//! * Riemann `R[b][g][d][a] = R^b_{g d a}` with
//!   `R^b_{gda} = d_d Gamma^b_{ag} - d_a Gamma^b_{dg}
//!    + Gamma^b_{de} Gamma^e_{ag} - Gamma^b_{ae} Gamma^e_{dg}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{diff1, Order};
use crate::{Error, Result};

/// Uniform lattice in `R^n`; axis 0 varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridN {
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl GridN {
    pub fn new(dims: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self> {
        let n = dims.len();
        if !(n == 2 || n == 3) {
            return Err(Error::InvalidParameter("dimension must be 2 or 3"));
        }
        if spacing.len() != n || origin.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                got: spacing.len().min(origin.len()),
            });
        }
        if spacing.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidParameter(
                "grid spacing must be positive and finite",
            ));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidParameter("grid origin must be finite"));
        }
        if let Some(&d) = dims.iter().min() {
            if d < 3 {
                return Err(Error::GridTooSmall { need: 3, got: d });
            }
        }
        Ok(GridN {
            dims,
            spacing,
            origin,
        })
    }

    /// Cube `[a, a + (m-1) h]^n`.
    pub fn cube(n: usize, m: usize, a: f64, h: f64) -> Result<Self> {
        GridN::new(vec![m; n], vec![h; n], vec![a; n])
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.dims[..axis].iter().product()
    }

    /// Multi-index of a linear point index.
    pub fn multi(&self, mut p: usize) -> [usize; 3] {
        let mut m = [0; 3];
        for (a, d) in self.dims.iter().enumerate() {
            m[a] = p % d;
            p /= d;
        }
        m
    }

    pub fn coords(&self, p: usize) -> [f64; 3] {
        let m = self.multi(p);
        let mut c = [0.0; 3];
        for a in 0..self.n() {
            c[a] = self.origin[a] + m[a] as f64 * self.spacing[a];
        }
        c
    }

    pub fn is_interior(&self, p: usize) -> bool {
        let m = self.multi(p);
        (0..self.n()).all(|a| m[a] > 0 && m[a] + 1 < self.dims[a])
    }

    /// Derivative along `axis` of a field with `width` values per point.
    pub fn partial(&self, f: &[f64], width: usize, axis: usize, order: Order) -> Vec<f64> {
        let n_axis = self.dims[axis];
        let h = self.spacing[axis];
        let st = self.stride(axis);
        let rows = crate::par::map(self.len(), |p| {
            let i = self.multi(p)[axis];
            let base = p - i * st;
            let mut out = vec![0.0; width];
            for (c, o) in out.iter_mut().enumerate() {
                *o = diff1(|k| f[(base + k * st) * width + c], n_axis, h, i, order);
            }
            out
        });
        rows.into_iter().flatten().collect()
    }
}

/// Connection, tensor and 1-form of an immersion sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ImmersionDataN {
    pub grid: GridN,
    /// `Gamma^a_{bc}`, `n^3` values per point.
    pub gamma: Vec<f64>,
    /// `h_{ab}`, `n^2` values per point.
    pub h: Vec<f64>,
    /// `psi_a`, `n` values per point.
    pub psi: Vec<f64>,
}

const TORSION_TOL: f64 = 1e-10;

impl ImmersionDataN {
    /// Validates shapes, invertibility of `h` and torsion-freeness of `Gamma`.
    pub fn new(grid: GridN, gamma: Vec<f64>, h: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        let n = grid.n();
        let np = grid.len();
        for (len, per) in [(gamma.len(), n * n * n), (h.len(), n * n), (psi.len(), n)] {
            if len != np * per {
                return Err(Error::ShapeMismatch {
                    expected: np * per,
                    got: len,
                });
            }
        }
        if gamma.iter().chain(&h).chain(&psi).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let data = ImmersionDataN {
            grid,
            gamma,
            h,
            psi,
        };
        for p in 0..np {
            let hp = data.h_at(p);
            if det(hp, n).abs() <= 1e-10 {
                return Err(Error::Singular);
            }
            let g = data.gamma_at(p);
            let mut worst = 0.0_f64;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let d = g[a * n * n + b * n + c] - g[a * n * n + c * n + b];
                        worst = worst.max(d.abs());
                    }
                }
            }
            if worst > TORSION_TOL {
                return Err(Error::Torsion { residual: worst });
            }
        }
        Ok(data)
    }

    /// Same `(Gamma, h, psi)` at every grid point.
    pub fn constant(grid: GridN, gamma: &[f64], h: &[f64], psi: &[f64]) -> Result<Self> {
        let np = grid.len();
        let rep = |v: &[f64]| -> Vec<f64> { (0..np).flat_map(|_| v.iter().copied()).collect() };
        ImmersionDataN::new(grid.clone(), rep(gamma), rep(h), rep(psi))
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn gamma_at(&self, p: usize) -> &[f64] {
        let n3 = self.n().pow(3);
        &self.gamma[p * n3..(p + 1) * n3]
    }

    pub fn h_at(&self, p: usize) -> &[f64] {
        let n2 = self.n().pow(2);
        &self.h[p * n2..(p + 1) * n2]
    }

    pub fn psi_at(&self, p: usize) -> &[f64] {
        let n = self.n();
        &self.psi[p * n..(p + 1) * n]
    }

    fn interior_max(&self, field: &[f64], width: usize) -> f64 {
        let g = &self.grid;
        crate::par::max_of(g.len(), |p| {
            if !g.is_interior(p) {
                return 0.0;
            }
            field[p * width..(p + 1) * width]
                .iter()
                .fold(0.0_f64, |m, v| {
                    if v.is_nan() {
                        f64::INFINITY
                    } else {
                        m.max(v.abs())
                    }
                })
        })
    }
}

fn det(m: &[f64], n: usize) -> f64 {
    match n {
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
    }
}

/// Inverse of a row-major `n x n` matrix (`n` = 2 or 3).
fn inverse(m: &[f64], n: usize) -> Result<Vec<f64>> {
    let d = det(m, n);
    if d.abs() <= 1e-300 || !d.is_finite() {
        return Err(Error::Singular);
    }
    let mut out = vec![0.0; n * n];
    if n == 2 {
        out[0] = m[3] / d;
        out[1] = -m[1] / d;
        out[2] = -m[2] / d;
        out[3] = m[0] / d;
    } else {
        for i in 0..3 {
            for j in 0..3 {
                let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
                let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                // adjugate: transpose of cofactors
                out[j * 3 + i] =
                    (m[i1 * 3 + j1] * m[i2 * 3 + j2] - m[i1 * 3 + j2] * m[i2 * 3 + j1]) / d;
            }
        }
    }
    Ok(out)
}

/// Maurer-Cartan matrices `U_a = F^{-1} d_a F` and `U*_a = (F*)^{-1} d_a F*`
/// with `F = (x, xi_1, ..., xi_n)`, `F* = (chi, eta_1, ..., eta_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaurerCartanN {
    pub n: usize,
    /// Per point and direction: `(n+1)^2` entries, row-major.
    pub u: Vec<f64>,
    pub ustar: Vec<f64>,
}

impl MaurerCartanN {
    fn block(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    pub fn u_at(&self, p: usize, alpha: usize) -> &[f64] {
        let b = self.block();
        let off = (p * self.n + alpha) * b;
        &self.u[off..off + b]
    }

    pub fn ustar_at(&self, p: usize, alpha: usize) -> &[f64] {
        let b = self.block();
        let off = (p * self.n + alpha) * b;
        &self.ustar[off..off + b]
    }
}

/// Builds `U_a` and `U*_a` entrywise:
/// `(U_a)_00 = psi_a`, `(U_a)_0g = -h_{ga}`, `(U_a)_b0 = delta^b_a`,
/// `(U_a)_bg = Gamma^b_{ag} + psi_a delta^b_g`; and
/// `(U*_a)_00 = -psi_a`, `(U*_a)_0g = -h_{ag}`, `(U*_a)_b0 = delta^b_a`,
/// `(U*_a)_bg = Gamma*^b_{ga} - psi_a delta^b_g` with `Gamma* = Gamma + K`.
pub fn build_u(data: &ImmersionDataN) -> Result<MaurerCartanN> {
    let n = data.n();
    let m = n + 1;
    let k = difference_tensor(data)?;
    let np = data.grid.len();
    let mut u = vec![0.0; np * n * m * m];
    let mut us = vec![0.0; np * n * m * m];
    for p in 0..np {
        let g = data.gamma_at(p);
        let h = data.h_at(p);
        let ps = data.psi_at(p);
        let kp = &k[p * n * n * n..(p + 1) * n * n * n];
        for a in 0..n {
            let off = (p * n + a) * m * m;
            let blk = &mut u[off..off + m * m];
            let bls = &mut us[off..off + m * m];
            blk[0] = ps[a];
            bls[0] = -ps[a];
            for gi in 0..n {
                blk[gi + 1] = -h[gi * n + a];
                bls[gi + 1] = -h[a * n + gi];
            }
            for b in 0..n {
                blk[(b + 1) * m] = if b == a { 1.0 } else { 0.0 };
                bls[(b + 1) * m] = if b == a { 1.0 } else { 0.0 };
                for gi in 0..n {
                    let delta = if b == gi { ps[a] } else { 0.0 };
                    blk[(b + 1) * m + gi + 1] = g[b * n * n + a * n + gi] + delta;
                    // Gamma*^b_{g a} = Gamma^b_{g a} + K^b(X = a, Y = g)
                    let star = g[b * n * n + gi * n + a] + kp[b * n * n + a * n + gi];
                    bls[(b + 1) * m + gi + 1] = star - delta;
                }
            }
        }
    }
    Ok(MaurerCartanN { n, u, ustar: us })
}

/// Zero-curvature residual of `U`: max over interior of
/// `|d_a U_d - d_d U_a + [U_a, U_d]|`.
pub fn mc_flatness_residual(data: &ImmersionDataN) -> Result<f64> {
    let mc = build_u(data)?;
    let n = data.n();
    let m = n + 1;
    let b = m * m;
    // U as field with n*b values per point
    let du: Vec<Vec<f64>> = (0..n)
        .map(|ax| data.grid.partial(&mc.u, n * b, ax, Order::Second))
        .collect();
    let g = &data.grid;
    Ok(crate::par::max_of(g.len(), |p| {
        if !g.is_interior(p) {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for a in 0..n {
            for d in 0..n {
                if a == d {
                    continue;
                }
                let ua = mc.u_at(p, a);
                let ud = mc.u_at(p, d);
                for r in 0..m {
                    for c in 0..m {
                        let mut br = 0.0;
                        for s in 0..m {
                            br += ua[r * m + s] * ud[s * m + c] - ud[r * m + s] * ua[s * m + c];
                        }
                        let dad = du[a][(p * n + d) * b + r * m + c];
                        let dda = du[d][(p * n + a) * b + r * m + c];
                        worst = worst.max((dad - dda + br).abs());
                    }
                }
            }
        }
        worst
    }))
}

/// Pointwise compatibility residual fields (max-abs over components;
/// zero on the boundary) and their interior maxima.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatResiduals {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r1_field: Vec<f64>,
    pub r2_field: Vec<f64>,
    pub r3_field: Vec<f64>,
}

struct Derivs {
    dpsi: Vec<Vec<f64>>,
    dh: Vec<Vec<f64>>,
    dgamma: Vec<Vec<f64>>,
}

fn derivs(data: &ImmersionDataN) -> Result<Derivs> {
    derivs_with(data, Order::Second)
}

fn derivs_with(data: &ImmersionDataN, order: Order) -> Result<Derivs> {
    let n = data.n();
    let g = &data.grid;
    let need = if order == Order::Second { 3 } else { 5 };
    if let Some(&d) = g.dims.iter().min() {
        if d < need {
            return Err(Error::GridTooSmall { need, got: d });
        }
    }
    Ok(Derivs {
        dpsi: (0..n).map(|a| g.partial(&data.psi, n, a, order)).collect(),
        dh: (0..n)
            .map(|a| g.partial(&data.h, n * n, a, order))
            .collect(),
        dgamma: (0..n)
            .map(|a| g.partial(&data.gamma, n * n * n, a, order))
            .collect(),
    })
}

fn riemann_point(data: &ImmersionDataN, d: &Derivs, p: usize) -> Vec<f64> {
    let n = data.n();
    let n2 = n * n;
    let n3 = n2 * n;
    let g = data.gamma_at(p);
    let gi = |a: usize, b: usize, c: usize| g[a * n2 + b * n + c];
    let mut r = vec![0.0; n2 * n2];
    for b in 0..n {
        for gm in 0..n {
            for dl in 0..n {
                for a in 0..n {
                    let mut v = d.dgamma[dl][p * n3 + b * n2 + a * n + gm]
                        - d.dgamma[a][p * n3 + b * n2 + dl * n + gm];
                    for e in 0..n {
                        v += gi(b, dl, e) * gi(e, a, gm) - gi(b, a, e) * gi(e, dl, gm);
                    }
                    r[((b * n + gm) * n + dl) * n + a] = v;
                }
            }
        }
    }
    r
}

/// Riemann tensor field `R^b_{gda}` (`n^4` values per point).
pub fn riemann(data: &ImmersionDataN) -> Result<Vec<f64>> {
    let d = derivs(data)?;
    Ok(
        crate::par::map(data.grid.len(), |p| riemann_point(data, &d, p))
            .into_iter()
            .flatten()
            .collect(),
    )
}

/// Ricci tensor `R_{ga} = R^d_{gda}` (`n^2` values per point).
pub fn ricci(data: &ImmersionDataN) -> Result<Vec<f64>> {
    let n = data.n();
    let r = riemann(data)?;
    Ok(ricci_from_riemann(&r, n))
}

fn ricci_from_riemann(r: &[f64], n: usize) -> Vec<f64> {
    let n4 = n.pow(4);
    let np = r.len() / n4;
    let mut out = vec![0.0; np * n * n];
    for p in 0..np {
        let rp = &r[p * n4..(p + 1) * n4];
        for g in 0..n {
            for a in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    s += rp[((d * n + g) * n + d) * n + a];
                }
                out[p * n * n + g * n + a] = s;
            }
        }
    }
    out
}

/// `h = (n Ric + Ric^T) / (n^2 - 1)`, the inverse of `Ric = n h - h^T`.
pub fn h_from_ricci(ric: &[f64], n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter("dimension must be at least 2"));
    }
    if ric.len() % (n * n) != 0 {
        return Err(Error::ShapeMismatch {
            expected: n * n,
            got: ric.len(),
        });
    }
    let s = 1.0 / ((n * n - 1) as f64);
    let mut out = vec![0.0; ric.len()];
    for p in 0..ric.len() / (n * n) {
        let r = &ric[p * n * n..(p + 1) * n * n];
        for a in 0..n {
            for b in 0..n {
                out[p * n * n + a * n + b] = (n as f64 * r[a * n + b] + r[b * n + a]) * s;
            }
        }
    }
    Ok(out)
}

/// Projective Weyl tensor field `W^b_{gda}` (`n^4` per point).
pub fn weyl(data: &ImmersionDataN) -> Result<Vec<f64>> {
    let n = data.n();
    let r = riemann(data)?;
    let ric = ricci_from_riemann(&r, n);
    let n2 = n * n;
    let n4 = n2 * n2;
    let nf = n as f64;
    let s = 1.0 / ((n * n - 1) as f64);
    let mut w = r.clone();
    for p in 0..data.grid.len() {
        let rc = &ric[p * n2..(p + 1) * n2];
        let rr = |a: usize, b: usize| rc[a * n + b];
        for b in 0..n {
            for g in 0..n {
                for d in 0..n {
                    for a in 0..n {
                        let mut v = 0.0;
                        if b == a {
                            v += nf * rr(g, d) + rr(d, g);
                        }
                        if b == d {
                            v -= nf * rr(g, a) + rr(a, g);
                        }
                        if b == g {
                            v += (nf - 1.0) * (rr(a, d) - rr(d, a));
                        }
                        w[p * n4 + ((b * n + g) * n + d) * n + a] += s * v;
                    }
                }
            }
        }
    }
    Ok(w)
}

/// Largest interior entry of the Weyl tensor.
pub fn weyl_max(data: &ImmersionDataN) -> Result<f64> {
    let w = weyl(data)?;
    Ok(data.interior_max(&w, data.n().pow(4)))
}

/// The three compatibility residuals:
/// * `r1_{ad} = d_d psi_a - d_a psi_d - (h_{ad} - h_{da})`,
/// * `r2_{gda} = (nabla_d h)_{ga} - (nabla_a h)_{gd}`,
/// * `r3^b_{gda} = R^b_{gda} - delta^b_d h_{ga} + delta^b_a h_{gd} - delta^b_g (h_{da} - h_{ad})`.
pub fn compatibility_residuals(data: &ImmersionDataN) -> Result<CompatResiduals> {
    let n = data.n();
    let d = derivs(data)?;
    let c = cubic_form_with(data, &d);
    let n2 = n * n;
    let n3 = n2 * n;
    let g = &data.grid;
    let fields = crate::par::map(g.len(), |p| {
        if !g.is_interior(p) {
            return (0.0, 0.0, 0.0);
        }
        let h = data.h_at(p);
        let mut r1 = 0.0_f64;
        for a in 0..n {
            for dl in 0..n {
                let v =
                    d.dpsi[dl][p * n + a] - d.dpsi[a][p * n + dl] - (h[a * n + dl] - h[dl * n + a]);
                r1 = r1.max(v.abs());
            }
        }
        let cp = &c[p * n3..(p + 1) * n3];
        let mut r2 = 0.0_f64;
        for gm in 0..n {
            for dl in 0..n {
                for a in 0..n {
                    let v = cp[gm * n2 + a * n + dl] - cp[gm * n2 + dl * n + a];
                    r2 = r2.max(v.abs());
                }
            }
        }
        let rm = riemann_point(data, &d, p);
        let mut r3 = 0.0_f64;
        for b in 0..n {
            for gm in 0..n {
                for dl in 0..n {
                    for a in 0..n {
                        let mut v = rm[((b * n + gm) * n + dl) * n + a];
                        if b == dl {
                            v -= h[gm * n + a];
                        }
                        if b == a {
                            v += h[gm * n + dl];
                        }
                        if b == gm {
                            v -= h[dl * n + a] - h[a * n + dl];
                        }
                        r3 = r3.max(v.abs());
                    }
                }
            }
        }
        (r1, r2, r3)
    });
    let r1_field: Vec<f64> = fields.iter().map(|f| f.0).collect();
    let r2_field: Vec<f64> = fields.iter().map(|f| f.1).collect();
    let r3_field: Vec<f64> = fields.iter().map(|f| f.2).collect();
    let mx = |v: &[f64]| {
        v.iter().fold(
            0.0_f64,
            |m, x| if x.is_nan() { f64::INFINITY } else { m.max(*x) },
        )
    };
    Ok(CompatResiduals {
        r1: mx(&r1_field),
        r2: mx(&r2_field),
        r3: mx(&r3_field),
        r1_field,
        r2_field,
        r3_field,
    })
}

/// Discrete `dpsi + 2 omega` with `omega = (h - h^T)/2`, as `n^2` values per
/// point: entry `[a][d]` is `d_d psi_a - d_a psi_d + (h_{da} - h_{ad})`.
pub fn dpsi_plus_two_omega(data: &ImmersionDataN) -> Result<Vec<f64>> {
    let n = data.n();
    let d = derivs(data)?;
    let mut out = vec![0.0; data.grid.len() * n * n];
    for p in 0..data.grid.len() {
        let h = data.h_at(p);
        for a in 0..n {
            for dl in 0..n {
                out[p * n * n + a * n + dl] =
                    d.dpsi[dl][p * n + a] - d.dpsi[a][p * n + dl] + (h[dl * n + a] - h[a * n + dl]);
            }
        }
    }
    Ok(out)
}

fn cubic_form_with(data: &ImmersionDataN, d: &Derivs) -> Vec<f64> {
    let n = data.n();
    let n2 = n * n;
    let n3 = n2 * n;
    crate::par::map(data.grid.len(), |p| {
        let g = data.gamma_at(p);
        let h = data.h_at(p);
        let mut c = vec![0.0; n3];
        for a in 0..n {
            for b in 0..n {
                for gm in 0..n {
                    let mut v = d.dh[gm][p * n2 + a * n + b];
                    for m in 0..n {
                        v -= g[m * n2 + gm * n + a] * h[m * n + b]
                            + g[m * n2 + gm * n + b] * h[a * n + m];
                    }
                    c[a * n2 + b * n + gm] = v;
                }
            }
        }
        c
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Cubic form `C_{abc} = (nabla_c h)_{ab}` (`n^3` per point).
pub fn cubic_form(data: &ImmersionDataN) -> Result<Vec<f64>> {
    cubic_form_order(data, Order::Second)
}

/// [`cubic_form`] with a choice of difference stencil.
pub fn cubic_form_order(data: &ImmersionDataN, order: Order) -> Result<Vec<f64>> {
    let d = derivs_with(data, order)?;
    Ok(cubic_form_with(data, &d))
}

/// Difference tensor `K^m_{xy}` from `h_{zm} K^m_{xy} = C_{zyx}`.
pub fn difference_tensor(data: &ImmersionDataN) -> Result<Vec<f64>> {
    difference_tensor_order(data, Order::Second)
}

/// [`difference_tensor`] with a choice of difference stencil.
pub fn difference_tensor_order(data: &ImmersionDataN, order: Order) -> Result<Vec<f64>> {
    let c = cubic_form_order(data, order)?;
    difference_tensor_from(&c, &data.h, data.n())
}

/// Solves `h_{zm} K^m_{xy} = C_{zyx}` pointwise for given `C` and `h` fields.
pub fn difference_tensor_from(c: &[f64], h: &[f64], n: usize) -> Result<Vec<f64>> {
    let n2 = n * n;
    let n3 = n2 * n;
    let np = h.len() / n2;
    if c.len() != np * n3 {
        return Err(Error::ShapeMismatch {
            expected: np * n3,
            got: c.len(),
        });
    }
    let mut k = vec![0.0; np * n3];
    for p in 0..np {
        let hinv = inverse(&h[p * n2..(p + 1) * n2], n)?;
        let cp = &c[p * n3..(p + 1) * n3];
        for m in 0..n {
            for x in 0..n {
                for y in 0..n {
                    let mut v = 0.0;
                    for z in 0..n {
                        // (h^{-1})_{m z} C_{z y x}
                        v += hinv[m * n + z] * cp[z * n2 + y * n + x];
                    }
                    k[p * n3 + m * n2 + x * n + y] = v;
                }
            }
        }
    }
    Ok(k)
}

/// Tchebycheff form `T_a = C_{abc} g^{bc} / 2` with `g = (h + h^T)/2`.
pub fn tchebycheff(c: &[f64], h: &[f64], n: usize) -> Result<Vec<f64>> {
    let n2 = n * n;
    let n3 = n2 * n;
    let np = h.len() / n2;
    if c.len() != np * n3 {
        return Err(Error::ShapeMismatch {
            expected: np * n3,
            got: c.len(),
        });
    }
    let mut t = vec![0.0; np * n];
    for p in 0..np {
        let hp = &h[p * n2..(p + 1) * n2];
        let mut g = vec![0.0; n2];
        for a in 0..n {
            for b in 0..n {
                g[a * n + b] = 0.5 * (hp[a * n + b] + hp[b * n + a]);
            }
        }
        let ginv = inverse(&g, n)?;
        let cp = &c[p * n3..(p + 1) * n3];
        for a in 0..n {
            let mut s = 0.0;
            for b in 0..n {
                for cc in 0..n {
                    s += cp[a * n2 + b * n + cc] * ginv[b * n + cc];
                }
            }
            t[p * n + a] = 0.5 * s;
        }
    }
    Ok(t)
}

/// Minimal iff the Tchebycheff form (trace of `C`) vanishes on the interior.
pub fn is_minimal(data: &ImmersionDataN, tol: f64) -> Result<bool> {
    let c = cubic_form(data)?;
    let t = tchebycheff(&c, &data.h, data.n())?;
    Ok(data.interior_max(&t, data.n()) < tol)
}

/// Totally geodesic iff `C` vanishes on the interior.
pub fn is_totally_geodesic(data: &ImmersionDataN, tol: f64) -> Result<bool> {
    let c = cubic_form(data)?;
    Ok(data.interior_max(&c, data.n().pow(3)) < tol)
}

/// Interior maxima of `|T|` and `|C|`.
pub fn cubic_norms(data: &ImmersionDataN) -> Result<(f64, f64)> {
    let c = cubic_form(data)?;
    let t = tchebycheff(&c, &data.h, data.n())?;
    Ok((
        data.interior_max(&t, data.n()),
        data.interior_max(&c, data.n().pow(3)),
    ))
}

/// Summary report for a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct FramesReport {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub weyl: f64,
    pub tchebycheff: f64,
    pub cubic: f64,
    pub minimal: bool,
    pub totally_geodesic: bool,
}

/// Runs every diagnostic with tolerance `tol` for the predicates.
pub fn report(data: &ImmersionDataN, tol: f64) -> Result<FramesReport> {
    let r = compatibility_residuals(data)?;
    let (t, c) = cubic_norms(data)?;
    Ok(FramesReport {
        r1: r.r1,
        r2: r.r2,
        r3: r.r3,
        weyl: weyl_max(data)?,
        tchebycheff: t,
        cubic: c,
        minimal: t < tol,
        totally_geodesic: c < tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_3x3() {
        let m = [2.0, 1.0, 0.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0];
        let inv = inverse(&m, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i * 3 + k] * inv[k * 3 + j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn flat_identity_frame_matrices() {
        let grid = GridN::cube(2, 5, 0.0, 0.25).unwrap();
        let d =
            ImmersionDataN::constant(grid, &[0.0; 8], &[1.0, 0.0, 0.0, 1.0], &[0.0, 0.0]).unwrap();
        let mc = build_u(&d).unwrap();
        let u1 = mc.u_at(7, 0);
        assert_eq!(u1, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = compatibility_residuals(&d).unwrap();
        assert_eq!((r.r1, r.r2), (0.0, 0.0));
        // constant data: R = 0 but h terms survive
        assert!(r.r3 > 0.5);
        let ric = [2.0, 0.0, 0.0, 2.0];
        assert_eq!(h_from_ricci(&ric, 2).unwrap(), vec![2.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn torsion_rejected() {
        let grid = GridN::cube(2, 3, 0.0, 1.0).unwrap();
        let mut gamma = [0.0; 8];
        gamma[1] = 1.0; // Gamma^0_{01} without Gamma^0_{10}
        let err = ImmersionDataN::constant(grid, &gamma, &[1.0, 0.0, 0.0, 1.0], &[0.0, 0.0]);
        assert!(matches!(err, Err(Error::Torsion { .. })));
    }
}
