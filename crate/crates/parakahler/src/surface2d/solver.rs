// Newton solver for the Tzitzeica equation, the Cauchy-transform solution
// of the dbar-problem for rho, and unimodular normalization of frames.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use super::SurfaceData;
use crate::grid::{dz_dzb, laplacian_at, Grid2, Order};
use crate::liealg::{Mat3C, Signature};
use crate::math;
use crate::{Error, Result};

/// Largest grid (points) accepted by the direct-summation Cauchy transform.
pub const RHO_CAP: usize = 64 * 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Stop once the max-abs residual falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Bound on `|dzb Q|` over the interior.
    pub holomorphic_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iter: 50,
            holomorphic_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonReport {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Band matrix with room for the fill-in of partial pivoting.
struct Band {
    n: usize,
    kl: usize,
    ku: usize,
    w: usize,
    a: Vec<f64>,
}

impl Band {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let w = 2 * kl + ku + 1;
        Band {
            n,
            kl,
            ku,
            w,
            a: vec![0.0; n * w],
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> usize {
        r * self.w + (c + self.kl - r)
    }

    fn add(&mut self, r: usize, c: usize, v: f64) {
        let k = self.at(r, c);
        self.a[k] += v;
    }

    /// Gaussian elimination with partial pivoting; overwrites `b` with the solution.
    fn solve(mut self, b: &mut [f64]) -> Result<()> {
        let n = self.n;
        let reach = self.kl + self.ku;
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.a[self.at(k, k)].abs();
            for r in k + 1..=last {
                let v = self.a[self.at(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular);
            }
            let cend = (k + reach).min(n - 1);
            if p != k {
                for c in k..=cend {
                    let (i1, i2) = (self.at(k, c), self.at(p, c));
                    self.a.swap(i1, i2);
                }
                b.swap(k, p);
            }
            let piv = self.a[self.at(k, k)];
            for r in k + 1..=last {
                let f = self.a[self.at(r, k)] / piv;
                if f == 0.0 {
                    continue;
                }
                for c in k..=cend {
                    let v = self.a[self.at(k, c)];
                    let i = self.at(r, c);
                    self.a[i] -= f * v;
                }
                b[r] -= f * b[k];
            }
        }
        for r in (0..n).rev() {
            let mut s = b[r];
            for c in r + 1..=(r + reach).min(n - 1) {
                s -= self.a[self.at(r, c)] * b[c];
            }
            b[r] = s / self.a[self.at(r, r)];
        }
        Ok(())
    }
}

fn tz_residual(u: &[f64], q2: &[f64], h: f64, g: &Grid2, out: &mut [f64]) {
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let k = g.idx(i, j);
            let e = math::exp(u[k]);
            out[(j - 1) * (g.nx - 2) + i - 1] =
                0.25 * laplacian_at(u, g, i, j) + q2[k] / (e * e) + h * e;
        }
    }
}

fn norms(r: &[f64]) -> (f64, f64) {
    let mut two = 0.0;
    let mut inf = 0.0_f64;
    for v in r {
        two += v * v;
        inf = if v.is_nan() {
            f64::INFINITY
        } else {
            inf.max(v.abs())
        };
    }
    (math::sqrt(two), inf)
}

/// Solves `Laplacian(u)/4 + e^{-2u}|Q|^2 + H e^u = 0` with Dirichlet data.
///
/// Edge values of `boundary` are kept fixed; interior values of `init`
/// (or zero) start a damped Newton iteration with Armijo backtracking.
pub fn solve_tzitzeica(
    sig: Signature,
    grid: &Grid2,
    q: &[C64],
    boundary: &[f64],
    init: Option<&[f64]>,
    opts: &NewtonOptions,
) -> Result<NewtonReport> {
    grid.validate()?;
    grid.require(3)?;
    grid.check_len(q.len())?;
    grid.check_len(boundary.len())?;
    if let Some(u0) = init {
        grid.check_len(u0.len())?;
    }
    if grid.nx >= 5 && grid.ny >= 5 {
        let (_, dbq) = dz_dzb(q, grid, Order::Second)?;
        let worst = crate::par::max_of(grid.len(), |k| {
            let (i, j) = grid.ij(k);
            if grid.is_interior(i, j) {
                dbq[k].norm()
            } else {
                0.0
            }
        });
        if !(worst < opts.holomorphic_tol) {
            return Err(Error::NotHolomorphic { residual: worst });
        }
    }
    let h = sig.h();
    let (nx, ny) = (grid.nx, grid.ny);
    let mut u: Vec<f64> = (0..grid.len())
        .map(|k| {
            let (i, j) = grid.ij(k);
            if grid.is_interior(i, j) {
                init.map_or(0.0, |u0| u0[k])
            } else {
                boundary[k]
            }
        })
        .collect();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let q2: Vec<f64> = q.iter().map(|z| z.norm_sqr()).collect();
    let m = (nx - 2) * (ny - 2);
    let mut r = vec![0.0; m];
    tz_residual(&u, &q2, h, grid, &mut r);
    let (mut r2, mut rinf) = norms(&r);
    let (ax, ay) = (0.25 / (grid.hx * grid.hx), 0.25 / (grid.hy * grid.hy));
    let bw = nx - 2;
    let mut it = 0;
    while rinf >= opts.tol {
        if it == opts.max_iter {
            return Err(Error::NewtonDiverged {
                iterations: it,
                residual: rinf,
            });
        }
        it += 1;
        let mut jac = Band::new(m, bw, bw);
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let row = (j - 1) * bw + i - 1;
                let e = math::exp(u[grid.idx(i, j)]);
                let diag = -2.0 * (ax + ay) - 2.0 * q2[grid.idx(i, j)] / (e * e) + h * e;
                jac.add(row, row, diag);
                if i > 1 {
                    jac.add(row, row - 1, ax);
                }
                if i + 2 < nx {
                    jac.add(row, row + 1, ax);
                }
                if j > 1 {
                    jac.add(row, row - bw, ay);
                }
                if j + 2 < ny {
                    jac.add(row, row + bw, ay);
                }
            }
        }
        let mut step: Vec<f64> = r.iter().map(|v| -v).collect();
        jac.solve(&mut step)?;
        let mut t = 1.0;
        let mut trial = u.clone();
        let mut rt = vec![0.0; m];
        loop {
            for j in 1..ny - 1 {
                for i in 1..nx - 1 {
                    let k = grid.idx(i, j);
                    trial[k] = u[k] + t * step[(j - 1) * bw + i - 1];
                }
            }
            tz_residual(&trial, &q2, h, grid, &mut rt);
            let (n2, ninf) = norms(&rt);
            if n2.is_finite() && n2 <= (1.0 - 1e-4 * t) * r2 {
                u.clone_from(&trial);
                r.clone_from(&rt);
                r2 = n2;
                rinf = ninf;
                break;
            }
            t *= 0.5;
            if t < 1e-10 {
                return Err(Error::NewtonDiverged {
                    iterations: it,
                    residual: rinf,
                });
            }
        }
    }
    Ok(NewtonReport {
        u,
        iterations: it,
        residual: rinf,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoSolution {
    pub rho: Vec<C64>,
    /// Interior max of `|dzb rho - H c e^u|`.
    pub residual: f64,
}

/// Solves `dzb rho = H c e^u` by the discrete Cauchy transform
/// `rho(z) = (1/pi) sum_w f(w) / (z - w) hx hy`, skipping the self cell.
pub fn solve_rho(data: &SurfaceData) -> Result<RhoSolution> {
    data.validate()?;
    let g = data.grid;
    if g.len() > RHO_CAP {
        return Err(Error::GridTooLarge {
            cap: RHO_CAP,
            got: g.len(),
        });
    }
    let h = data.sig.h();
    let f: Vec<C64> = data
        .c()
        .iter()
        .zip(&data.u)
        .map(|(c, u)| *c * (h * math::exp(*u)))
        .collect();
    let rho = cauchy_transform(&f, &g)?;
    let mut residual = 0.0;
    if g.nx >= 3 && g.ny >= 3 {
        let (_, db) = dz_dzb(&rho, &g, Order::Second)?;
        residual = crate::par::max_of(g.len(), |k| {
            let (i, j) = g.ij(k);
            if g.is_interior(i, j) {
                (db[k] - f[k]).norm()
            } else {
                0.0
            }
        });
    }
    Ok(RhoSolution { rho, residual })
}

/// `(1/pi) int_R dA(w) / (z - w)` over the rectangle `R`, from the boundary
/// integral `(1/(2 pi i)) oint (conj(w) - conj(z)) / (z - w) dw`.
fn rectangle_transform(z: C64, x: [f64; 2], y: [f64; 2]) -> C64 {
    let corners = [
        C64::new(x[0], y[0]),
        C64::new(x[1], y[0]),
        C64::new(x[1], y[1]),
        C64::new(x[0], y[1]),
    ];
    let mut s = C64::new(0.0, 0.0);
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        // conj(w) - conj(z) = s_e (w - z) + k_e along the edge
        let (sign, k) = if e % 2 == 0 {
            (1.0, C64::new(0.0, 2.0 * (z.im - a.im)))
        } else {
            (-1.0, C64::new(2.0 * (a.re - z.re), 0.0))
        };
        s += -(b - a) * sign;
        if k.norm() > 0.0 {
            // int dw / (z - w) = -log((z - b) / (z - a)); the segment does not cross z
            s -= k * ((z - b) / (z - a)).ln();
        }
    }
    s / C64::new(0.0, 2.0 * core::f64::consts::PI)
}

/// Discrete Cauchy transform `rho(z) = (1/pi) int f(w) / (z - w) dA(w)` over
/// the cells of the grid.
///
/// The singular part is subtracted first: `rho(z) = (1/pi) sum_{w != z}
/// (f(w) - f(z)) / (z - w) hx hy + f(z) T(z)` with `T` the exact transform of
/// the covered rectangle.
pub fn cauchy_transform(f: &[C64], g: &Grid2) -> Result<Vec<C64>> {
    g.check_len(f.len())?;
    let w = g.hx * g.hy / core::f64::consts::PI;
    let xr = [g.x0 - 0.5 * g.hx, g.x0 + (g.nx as f64 - 0.5) * g.hx];
    let yr = [g.y0 - 0.5 * g.hy, g.y0 + (g.ny as f64 - 0.5) * g.hy];
    Ok(crate::par::map(g.len(), |k| {
        let (i, j) = g.ij(k);
        let z = g.z(i, j);
        let fz = f[k];
        let mut s = C64::new(0.0, 0.0);
        for (l, fl) in f.iter().enumerate() {
            if l != k {
                let (a, b) = g.ij(l);
                s += (*fl - fz) / (z - g.z(a, b));
            }
        }
        s * w + fz * rectangle_transform(z, xr, yr)
    }))
}

/// Divides each frame by a cube root of its determinant so that `det = 1`.
/// Returns the normalized frames and the factors removed.
pub fn normalize_det(frames: &[Mat3C]) -> Result<(Vec<Mat3C>, Vec<C64>)> {
    let mut out = Vec::with_capacity(frames.len());
    let mut fac = Vec::with_capacity(frames.len());
    for f in frames {
        let d = f.det();
        if !(d.norm() > 1e-300) || !d.re.is_finite() || !d.im.is_finite() {
            return Err(Error::Vanishing);
        }
        let r = d.powf(1.0 / 3.0);
        let g = *f * r.inv();
        if (g.det() - 1.0).norm() >= 1e-10 {
            return Err(Error::Vanishing);
        }
        out.push(g);
        fac.push(r);
    }
    Ok((out, fac))
}
