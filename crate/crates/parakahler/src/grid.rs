//! Uniform rectangular grids and finite-difference stencils.
//!
//! Fields are stored row-major with the first coordinate `y1` varying
//! fastest: `k = j * nx + i` holds the value at `(x0 + i hx, y0 + j hy)`.
//! The complex coordinate is `z = y1 + i y2`, so `d/dz = (d1 - i d2) / 2`.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::liealg::Mat3C;
use crate::{Error, Result};

/// Accuracy order of a difference stencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Three-point central interior stencil, second-order one-sided at edges.
    Second,
    /// Five-point central interior stencil, fourth-order one-sided near edges.
    Fourth,
}

impl Order {
    fn min_points(self) -> usize {
        match self {
            Order::Second => 3,
            Order::Fourth => 5,
        }
    }
}

/// Values that can be combined linearly by a stencil.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl Linear for f64 {}
impl Linear for C64 {}
impl Linear for Mat3C {}

/// Rectangle `[x0, x0 + (nx-1) hx] x [y0, y0 + (ny-1) hy]` sampled uniformly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
}

impl Grid2 {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, hx: f64, hy: f64) -> Result<Self> {
        let g = Grid2 {
            nx,
            ny,
            x0,
            y0,
            hx,
            hy,
        };
        g.validate()?;
        Ok(g)
    }

    /// Square grid over `[a, b]^2` with `n` points per axis.
    pub fn square(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall { need: 2, got: n });
        }
        let h = (b - a) / (n - 1) as f64;
        Grid2::new(n, n, a, a, h, h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hx > 0.0 && self.hy > 0.0 && self.hx.is_finite() && self.hy.is_finite()) {
            return Err(Error::InvalidParameter(
                "grid spacing must be positive and finite",
            ));
        }
        if !(self.x0.is_finite() && self.y0.is_finite()) {
            return Err(Error::InvalidParameter("grid origin must be finite"));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::GridTooSmall { need: 1, got: 0 });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy)
    }

    #[inline]
    pub fn z(&self, i: usize, j: usize) -> C64 {
        let (a, b) = self.coords(i, j);
        C64::new(a, b)
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && i + 1 < self.nx && j + 1 < self.ny
    }

    /// Points at least `margin` steps away from every edge.
    pub fn interior_indices(&self, margin: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nx <= 2 * margin || self.ny <= 2 * margin {
            return out;
        }
        for j in margin..self.ny - margin {
            for i in margin..self.nx - margin {
                out.push(self.idx(i, j));
            }
        }
        out
    }

    pub fn require(&self, need: usize) -> Result<()> {
        let got = self.nx.min(self.ny);
        if got < need {
            Err(Error::GridTooSmall { need, got })
        } else {
            Ok(())
        }
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            Err(Error::ShapeMismatch {
                expected: self.len(),
                got: len,
            })
        } else {
            Ok(())
        }
    }

    /// Field of `f(z)` sampled at the grid points.
    pub fn sample<T, F: Fn(C64) -> T>(&self, f: F) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push(f(self.z(i, j)));
            }
        }
        out
    }
}

/// Derivative along a 1D line of `n` samples with spacing `h`, at index `i`.
/// `get(k)` returns the `k`-th sample.
pub fn diff1<T: Linear>(get: impl Fn(usize) -> T, n: usize, h: f64, i: usize, order: Order) -> T {
    match order {
        Order::Second => {
            if i == 0 {
                (get(1) * 4.0 - get(0) * 3.0 - get(2)) * (0.5 / h)
            } else if i + 1 == n {
                (get(n - 1) * 3.0 - get(n - 2) * 4.0 + get(n - 3)) * (0.5 / h)
            } else {
                (get(i + 1) - get(i - 1)) * (0.5 / h)
            }
        }
        Order::Fourth => {
            let s = 1.0 / (12.0 * h);
            if i >= 2 && i + 2 < n {
                (get(i - 2) - get(i - 1) * 8.0 + get(i + 1) * 8.0 - get(i + 2)) * s
            } else if i == 0 {
                (get(1) * 48.0 - get(0) * 25.0 - get(2) * 36.0 + get(3) * 16.0 - get(4) * 3.0) * s
            } else if i == 1 {
                (get(2) * 18.0 - get(0) * 3.0 - get(1) * 10.0 - get(3) * 6.0 + get(4)) * s
            } else if i + 1 == n {
                (get(n - 1) * 25.0 - get(n - 2) * 48.0 + get(n - 3) * 36.0 - get(n - 4) * 16.0
                    + get(n - 5) * 3.0)
                    * s
            } else {
                // i == n - 2
                (get(n - 1) * 3.0 + get(n - 2) * 10.0 - get(n - 3) * 18.0 + get(n - 4) * 6.0
                    - get(n - 5))
                    * s
            }
        }
    }
}

/// Partial derivative along axis 0 (`y1`) or 1 (`y2`) at one point.
pub fn partial_at<T: Linear>(
    f: &[T],
    g: &Grid2,
    axis: usize,
    i: usize,
    j: usize,
    order: Order,
) -> T {
    if axis == 0 {
        diff1(|k| f[g.idx(k, j)], g.nx, g.hx, i, order)
    } else {
        diff1(|k| f[g.idx(i, k)], g.ny, g.hy, j, order)
    }
}

/// Partial derivative field along `axis`.
pub fn partial<T: Linear + Send + Sync>(
    f: &[T],
    g: &Grid2,
    axis: usize,
    order: Order,
) -> Result<Vec<T>> {
    g.check_len(f.len())?;
    g.require(order.min_points())?;
    Ok(crate::par::map(g.len(), |k| {
        let (i, j) = g.ij(k);
        partial_at(f, g, axis, i, j, order)
    }))
}

/// `(d/dz, d/dzbar)` of a complex field.
pub fn dz_dzb(f: &[C64], g: &Grid2, order: Order) -> Result<(Vec<C64>, Vec<C64>)> {
    let d1 = partial(f, g, 0, order)?;
    let d2 = partial(f, g, 1, order)?;
    let i = C64::new(0.0, 1.0);
    let dz = d1
        .iter()
        .zip(&d2)
        .map(|(a, b)| (*a - i * *b) * 0.5)
        .collect();
    let dzb = d1
        .iter()
        .zip(&d2)
        .map(|(a, b)| (*a + i * *b) * 0.5)
        .collect();
    Ok((dz, dzb))
}

/// `(d/dz, d/dzbar)` of a real field.
pub fn dz_dzb_real(f: &[f64], g: &Grid2, order: Order) -> Result<(Vec<C64>, Vec<C64>)> {
    let d1 = partial(f, g, 0, order)?;
    let d2 = partial(f, g, 1, order)?;
    let dz: Vec<C64> = d1
        .iter()
        .zip(&d2)
        .map(|(a, b)| C64::new(*a, -*b) * 0.5)
        .collect();
    let dzb = dz.iter().map(|z| z.conj()).collect();
    Ok((dz, dzb))
}

/// `(d/dz, d/dzbar)` of a matrix field.
pub fn dz_dzb_mat(f: &[Mat3C], g: &Grid2, order: Order) -> Result<(Vec<Mat3C>, Vec<Mat3C>)> {
    let d1 = partial(f, g, 0, order)?;
    let d2 = partial(f, g, 1, order)?;
    let i = C64::new(0.0, 1.0);
    let dz = d1
        .iter()
        .zip(&d2)
        .map(|(a, b)| (*a - *b * i) * 0.5)
        .collect();
    let dzb = d1
        .iter()
        .zip(&d2)
        .map(|(a, b)| (*a + *b * i) * 0.5)
        .collect();
    Ok((dz, dzb))
}

/// Five-point Laplacian at an interior point.
pub fn laplacian_at(f: &[f64], g: &Grid2, i: usize, j: usize) -> f64 {
    let c = f[g.idx(i, j)];
    let fx = (f[g.idx(i + 1, j)] - 2.0 * c + f[g.idx(i - 1, j)]) / (g.hx * g.hx);
    let fy = (f[g.idx(i, j + 1)] - 2.0 * c + f[g.idx(i, j - 1)]) / (g.hy * g.hy);
    fx + fy
}
